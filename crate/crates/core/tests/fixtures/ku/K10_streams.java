import java.util.List;
import java.util.Optional;
import java.util.stream.Collectors;

class Streams {
    void m(List<String> words) {
        List<Integer> lengths = words.stream().map(String::length).collect(Collectors.toList());
        Optional<String> first = words.stream().filter(w -> w.startsWith("a")).findFirst();
        String value = first.orElse("none");
        int total = words.stream().mapToInt(String::length).sum();
        boolean any = words.stream().anyMatch(w -> w.isEmpty());
        List<String> sorted = words.stream().sorted().collect(Collectors.toList());
        long chars = words.stream().flatMap(w -> w.chars().boxed()).count();
        words.stream().peek(w -> {}).count();
    }
}
