import javax.annotation.Resource;
import javax.ejb.Schedule;
import javax.ejb.Stateless;
import javax.ejb.Timer;
import javax.ejb.TimerService;

@Stateless
public class ReportBean {
    @Resource
    TimerService timers;

    @Schedule(hour = "2")
    void nightly(Timer timer) {
    }
}
