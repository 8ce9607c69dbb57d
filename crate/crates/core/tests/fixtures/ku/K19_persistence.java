import javax.persistence.Entity;
import javax.persistence.EntityManager;
import javax.persistence.GeneratedValue;
import javax.persistence.Id;
import javax.persistence.PersistenceContext;
import javax.persistence.TypedQuery;

@Entity
class Customer {
    @Id
    @GeneratedValue
    private Long id;
}

class CustomerRepository {
    @PersistenceContext
    private EntityManager em;

    void save(Customer c) {
        em.getTransaction().begin();
        em.persist(c);
        TypedQuery<Customer> q = em.createQuery("select c from Customer c", Customer.class);
    }
}
