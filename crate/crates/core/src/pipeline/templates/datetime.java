package __P__;

import java.time.Duration;
import java.time.LocalDate;
import java.time.format.DateTimeFormatter;
import java.time.temporal.ChronoUnit;

public class __C__ {
    long gap() {
        LocalDate today = LocalDate.now();
        LocalDate later = today.plusDays(__N__);
        Duration d = Duration.ofHours(2);
        DateTimeFormatter fmt = DateTimeFormatter.ofPattern("yyyy-MM-dd");
        return ChronoUnit.DAYS.between(today, later);
    }
}
