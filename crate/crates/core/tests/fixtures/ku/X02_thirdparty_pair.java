import com.acme.concurrent.ConcurrentHashMap;
import com.acme.concurrent.ExecutorService;
import com.acme.concurrent.Executors;

class Cache {
    ConcurrentHashMap<String, String> entries = new ConcurrentHashMap<>();
    ExecutorService pool = Executors.newFixedThreadPool(4);

    void refresh() {
        pool.submit(() -> entries.clear());
    }
}
