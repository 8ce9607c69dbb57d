import java.io.*;
import java.util.Scanner;

class Console1 {
    void m() throws IOException {
        Scanner in = new Scanner(System.in);
        String line = in.nextLine();
        System.out.println(line);
        System.err.print("x");
        PrintWriter w = new PrintWriter(new FileWriter(new File("out.txt")));
        w.close();
        ObjectOutputStream oos = new ObjectOutputStream(new FileOutputStream("o.bin"));
    }
}
