class Arrays1 {
    void m() {
        int[] a = new int[3];
        int[] b = {1, 2, 3};
        a[0] = b[1];
        int[][] grid = new int[2][3];
        String[][] names = {{"a"}, {"b"}};
        grid[1][2] = 5;
    }
}
