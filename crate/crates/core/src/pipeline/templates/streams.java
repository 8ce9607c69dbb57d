package __P__;

import java.util.List;
import java.util.Optional;
import java.util.stream.Collectors;

public class __C__ {
    public List<Integer> lengths(List<String> words) {
        return words.stream().map(String::length).collect(Collectors.toList());
    }

    public String first(List<String> words) {
        Optional<String> hit = words.stream().filter(w -> w.length() > __N__).findFirst();
        return hit.orElse("none");
    }

    public long total(List<String> words) {
        return words.stream().mapToInt(String::length).sum();
    }
}
