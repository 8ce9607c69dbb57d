package __P__;

import java.util.ArrayList;
import java.util.Comparator;
import java.util.List;
import java.util.TreeMap;

public class __C__<T extends Comparable<T>> {
    private T value;

    <U> U echo(U u) {
        return u;
    }

    void fill() {
        List<String> names = new ArrayList<>();
        TreeMap<String, Integer> counts = new TreeMap<>();
        names.forEach(n -> counts.put(n, __N__));
        Comparator<String> byLength = Comparator.comparing(String::length);
    }
}
