package __P__;

public class __C__ {
    private int total = __N__;
    private int[] slots = new int[4];

    public int sum(int limit) {
        int acc = 0;
        for (int i = 0; i < limit; i++) {
            if (i % 2 == 0) {
                acc += slots[i % slots.length];
            }
        }
        return acc + total;
    }

    public int getTotal() {
        return total;
    }
}
