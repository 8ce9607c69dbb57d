import java.util.regex.Matcher;
import java.util.regex.Pattern;

class Strings {
    String m(String s) {
        int idx = s.indexOf("a");
        String part = s.substring(1).trim();
        int n = Integer.parseInt("42");
        StringBuilder sb = new StringBuilder();
        sb.append(part).append(n);
        Pattern p = Pattern.compile("[a-z]+");
        Matcher mt = p.matcher(s);
        boolean found = mt.find();
        String out = String.format("%d", idx);
        return sb.toString() + out;
    }
}
