import java.time.Duration;
import java.time.LocalDate;
import java.time.LocalDateTime;
import java.time.ZoneId;
import java.time.format.DateTimeFormatter;
import java.time.temporal.ChronoUnit;

class Dates {
    void m() {
        LocalDate today = LocalDate.now();
        LocalDate later = today.plusDays(3);
        long days = ChronoUnit.DAYS.between(today, later);
        Duration d = Duration.ofHours(2);
        DateTimeFormatter fmt = DateTimeFormatter.ofPattern("yyyy-MM-dd");
        String s = LocalDateTime.now().atZone(ZoneId.of("UTC")).format(fmt);
    }
}
