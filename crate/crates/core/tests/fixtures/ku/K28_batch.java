import java.io.Serializable;
import javax.batch.api.chunk.ItemReader;
import javax.batch.runtime.BatchRuntime;
import javax.inject.Named;

@Named
class LineReader implements ItemReader {
    public void open(Serializable checkpoint) {
    }

    public Object readItem() {
        return null;
    }

    void start() {
        long id = BatchRuntime.getJobOperator().start("job", null);
    }
}
