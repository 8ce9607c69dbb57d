import java.util.Locale;
import java.util.ResourceBundle;

class I18n {
    String greet() {
        Locale locale = new Locale("fr", "FR");
        Locale.setDefault(locale);
        ResourceBundle bundle = ResourceBundle.getBundle("Messages", locale);
        return bundle.getString("hello");
    }
}
