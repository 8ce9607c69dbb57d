package __P__;

public class __C__ {
    private String label = "n";

    public int count(int[] xs) {
        int hits = 0;
        for (int x : xs) {
            if (x > __N__ && x < 100) {
                hits++;
            }
        }
        int i = 0;
        while (i < hits) {
            i += 2;
        }
        return i;
    }

    public void setLabel(String label) {
        this.label = label;
    }
}
