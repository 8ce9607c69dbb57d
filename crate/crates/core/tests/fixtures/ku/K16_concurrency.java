import java.util.concurrent.*;
import java.util.concurrent.atomic.AtomicInteger;

class Workers {
    private final AtomicInteger count = new AtomicInteger();
    private final CopyOnWriteArrayList<String> log = new CopyOnWriteArrayList<>();

    synchronized void bump() {
        count.incrementAndGet();
    }

    void run() throws Exception {
        ExecutorService pool = Executors.newFixedThreadPool(2);
        Callable<Integer> task = () -> 1;
        Future<Integer> f = pool.submit(task);
        CyclicBarrier barrier = new CyclicBarrier(2);
        ForkJoinPool fj = new ForkJoinPool();
        synchronized (this) {
            log.add("x");
        }
        pool.shutdown();
    }
}
