package __P__;

import java.io.BufferedReader;
import java.io.FileReader;
import java.io.IOException;

class __C__Error extends Exception {
    __C__Error(String msg) {
        super(msg);
    }
}

public class __C__ {
    void check(int age) throws __C__Error {
        if (age > __N__) {
            throw new __C__Error("too old");
        }
    }

    String read(String path) {
        try (BufferedReader in = new BufferedReader(new FileReader(path))) {
            return in.readLine();
        } catch (IOException | RuntimeException e) {
            return null;
        }
    }
}
