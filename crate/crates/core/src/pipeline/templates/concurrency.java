package __P__;

import java.util.concurrent.*;
import java.util.concurrent.atomic.AtomicInteger;

public class __C__ {
    private final AtomicInteger count = new AtomicInteger(__N__);
    private final CopyOnWriteArrayList<String> log = new CopyOnWriteArrayList<>();

    synchronized void bump() {
        count.incrementAndGet();
    }

    void run() throws Exception {
        ExecutorService pool = Executors.newFixedThreadPool(2);
        Callable<Integer> task = () -> 1;
        Future<Integer> f = pool.submit(task);
        synchronized (this) {
            log.add("x");
        }
        pool.shutdown();
    }
}
