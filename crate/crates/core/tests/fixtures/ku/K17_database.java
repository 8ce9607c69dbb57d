import java.sql.Connection;
import java.sql.DriverManager;
import java.sql.PreparedStatement;
import java.sql.ResultSet;
import java.sql.SQLException;

class Dao {
    int count(String url) throws SQLException {
        Connection c = DriverManager.getConnection(url);
        PreparedStatement ps = c.prepareStatement("select count(*) from t");
        ResultSet rs = ps.executeQuery();
        int n = 0;
        while (rs.next()) {
            n = rs.getInt(1);
        }
        rs.close();
        ps.close();
        c.close();
        return n;
    }
}
