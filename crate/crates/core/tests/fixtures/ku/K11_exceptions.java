import java.io.BufferedReader;
import java.io.FileReader;
import java.io.IOException;

class InvalidAgeException extends Exception {
    InvalidAgeException(String msg) {
        super(msg);
    }
}

class Resource implements AutoCloseable {
    public void close() {
    }
}

class Errors {
    void check(int age) throws InvalidAgeException {
        assert age >= 0;
        if (age > 150) {
            throw new InvalidAgeException("too old");
        }
    }

    String read(String path) {
        try (BufferedReader in = new BufferedReader(new FileReader(path))) {
            return in.readLine();
        } catch (IOException | RuntimeException e) {
            return null;
        }
    }

    int divide(int a, int b) {
        try {
            return a / b;
        } catch (ArithmeticException e) {
            return 0;
        } finally {
            check2();
        }
    }

    void check2() {
    }
}
