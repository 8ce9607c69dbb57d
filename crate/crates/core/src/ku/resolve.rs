//! Import-table name resolution and receiver typing for one file.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::facts::{FactStream, NodeKind, Receiver};
use super::symbols::SymbolIndex;

/// Public types of `java.lang`, which every file sees without an import.
const JAVA_LANG: &[&str] = &[
    "AbstractMethodError", "Appendable", "ArithmeticException", "ArrayIndexOutOfBoundsException",
    "ArrayStoreException", "AssertionError", "AutoCloseable", "Boolean", "Byte", "CharSequence",
    "Character", "Class", "ClassCastException", "ClassLoader", "ClassNotFoundException",
    "CloneNotSupportedException", "Cloneable", "Comparable", "Deprecated", "Double", "Enum",
    "Error", "Exception", "Float", "FunctionalInterface", "IllegalAccessException",
    "IllegalArgumentException", "IllegalMonitorStateException", "IllegalStateException",
    "IndexOutOfBoundsException", "InheritableThreadLocal", "InstantiationException", "Integer",
    "InterruptedException", "Iterable", "LinkageError", "Long", "Math", "NegativeArraySizeException",
    "NoSuchFieldException", "NoSuchMethodException", "NullPointerException", "Number",
    "NumberFormatException", "Object", "OutOfMemoryError", "Override", "Process",
    "ProcessBuilder", "Readable", "Record", "ReflectiveOperationException", "Runnable", "Runtime",
    "RuntimeException", "SafeVarargs", "SecurityException", "Short", "StackOverflowError",
    "StrictMath", "String", "StringBuffer", "StringBuilder", "StringIndexOutOfBoundsException",
    "SuppressWarnings", "System", "Thread", "ThreadGroup", "ThreadLocal", "Throwable",
    "TypeNotPresentException", "UnsupportedOperationException", "VirtualMachineError", "Void",
];

const COLLECTIONS: &[&str] = &[
    "java.util.Collection", "java.util.List", "java.util.ArrayList", "java.util.LinkedList",
    "java.util.Set", "java.util.HashSet", "java.util.LinkedHashSet", "java.util.TreeSet",
    "java.util.SortedSet", "java.util.NavigableSet", "java.util.Queue", "java.util.Deque",
    "java.util.ArrayDeque", "java.util.PriorityQueue", "java.util.Vector", "java.util.Stack",
    "java.util.concurrent.CopyOnWriteArrayList", "java.util.concurrent.ConcurrentLinkedQueue",
    "java.util.concurrent.BlockingQueue", "java.util.concurrent.LinkedBlockingQueue",
    "java.util.concurrent.ArrayBlockingQueue",
];

const MAPS: &[&str] = &[
    "java.util.Map", "java.util.HashMap", "java.util.LinkedHashMap", "java.util.TreeMap",
    "java.util.SortedMap", "java.util.NavigableMap", "java.util.concurrent.ConcurrentHashMap",
    "java.util.concurrent.ConcurrentMap",
];

const STREAM: &str = "java.util.stream.Stream";
const INT_STREAM: &str = "java.util.stream.IntStream";
const LONG_STREAM: &str = "java.util.stream.LongStream";
const DOUBLE_STREAM: &str = "java.util.stream.DoubleStream";
const STRING: &str = "java.lang.String";

/// Static return type of `receiver.method(..)` for the platform methods that
/// commonly start or continue a call chain.
fn return_type(receiver: &str, method: &str) -> Option<&'static str> {
    let primitive_stream = matches!(receiver, INT_STREAM | LONG_STREAM | DOUBLE_STREAM);
    if receiver == STREAM || primitive_stream {
        let same: &'static str = match receiver {
            INT_STREAM => INT_STREAM,
            LONG_STREAM => LONG_STREAM,
            DOUBLE_STREAM => DOUBLE_STREAM,
            _ => STREAM,
        };
        return match method {
            "map" | "filter" | "sorted" | "peek" | "distinct" | "limit" | "skip" | "parallel"
            | "sequential" | "unordered" | "onClose" | "takeWhile" | "dropWhile" | "of"
            | "iterate" | "generate" | "concat" | "empty" => Some(same),
            "flatMap" => Some(same),
            "mapToObj" | "boxed" => Some(STREAM),
            "mapToInt" | "range" | "rangeClosed" => Some(INT_STREAM),
            "mapToLong" | "asLongStream" => Some(LONG_STREAM),
            "mapToDouble" | "asDoubleStream" => Some(DOUBLE_STREAM),
            "findFirst" | "findAny" | "min" | "max" | "reduce" if !primitive_stream => {
                Some("java.util.Optional")
            }
            "findFirst" | "findAny" | "min" | "max" | "reduce" => match receiver {
                INT_STREAM => Some("java.util.OptionalInt"),
                LONG_STREAM => Some("java.util.OptionalLong"),
                _ => Some("java.util.OptionalDouble"),
            },
            "average" => Some("java.util.OptionalDouble"),
            _ => None,
        };
    }
    if COLLECTIONS.contains(&receiver) {
        return match method {
            "stream" | "parallelStream" => Some(STREAM),
            "iterator" => Some("java.util.Iterator"),
            _ => None,
        };
    }
    if MAPS.contains(&receiver) {
        return match method {
            "entrySet" | "keySet" => Some("java.util.Set"),
            "values" => Some("java.util.Collection"),
            _ => None,
        };
    }
    let table: &[(&str, &[&str], &str)] = &[
        ("java.util.Arrays", &["stream"], STREAM),
        ("java.util.Arrays", &["asList"], "java.util.List"),
        ("java.util.List", &["of", "copyOf"], "java.util.List"),
        ("java.util.Set", &["of", "copyOf"], "java.util.Set"),
        ("java.util.Map", &["of", "copyOf"], "java.util.Map"),
        ("java.util.Optional", &["of", "ofNullable", "empty", "map", "filter", "flatMap", "or"], "java.util.Optional"),
        ("java.util.regex.Pattern", &["compile"], "java.util.regex.Pattern"),
        ("java.util.regex.Pattern", &["matcher"], "java.util.regex.Matcher"),
        ("java.sql.DriverManager", &["getConnection"], "java.sql.Connection"),
        ("java.sql.Connection", &["createStatement"], "java.sql.Statement"),
        ("java.sql.Connection", &["prepareStatement"], "java.sql.PreparedStatement"),
        ("java.sql.Connection", &["prepareCall"], "java.sql.CallableStatement"),
        ("java.sql.Statement", &["executeQuery", "getResultSet"], "java.sql.ResultSet"),
        ("java.sql.PreparedStatement", &["executeQuery", "getResultSet"], "java.sql.ResultSet"),
        ("java.sql.ResultSet", &["getMetaData"], "java.sql.ResultSetMetaData"),
        ("java.nio.file.Paths", &["get"], "java.nio.file.Path"),
        ("java.nio.file.Path", &["of", "resolve", "getParent", "getFileName", "getRoot", "normalize", "toAbsolutePath", "relativize", "resolveSibling", "subpath"], "java.nio.file.Path"),
        ("java.io.File", &["toPath"], "java.nio.file.Path"),
        ("java.nio.file.Files", &["lines"], STREAM),
        ("java.nio.file.Files", &["newBufferedReader"], "java.io.BufferedReader"),
        ("java.nio.file.Files", &["newBufferedWriter"], "java.io.BufferedWriter"),
        ("java.lang.String", &["trim", "strip", "substring", "toUpperCase", "toLowerCase", "replace", "replaceAll", "replaceFirst", "concat", "format", "valueOf", "join", "repeat", "intern"], STRING),
        ("java.lang.String", &["chars"], INT_STREAM),
        ("java.lang.StringBuilder", &["append", "insert", "reverse", "delete", "deleteCharAt", "replace"], "java.lang.StringBuilder"),
        ("java.lang.StringBuilder", &["toString", "substring"], STRING),
        ("java.lang.StringBuffer", &["append", "insert", "reverse", "delete", "deleteCharAt", "replace"], "java.lang.StringBuffer"),
        ("java.lang.StringBuffer", &["toString", "substring"], STRING),
        ("java.util.concurrent.Executors", &["newFixedThreadPool", "newCachedThreadPool", "newSingleThreadExecutor", "newWorkStealingPool"], "java.util.concurrent.ExecutorService"),
        ("java.util.concurrent.Executors", &["newScheduledThreadPool", "newSingleThreadScheduledExecutor"], "java.util.concurrent.ScheduledExecutorService"),
        ("java.util.concurrent.ExecutorService", &["submit"], "java.util.concurrent.Future"),
        ("java.util.concurrent.ForkJoinPool", &["commonPool"], "java.util.concurrent.ForkJoinPool"),
        ("java.util.Locale", &["getDefault", "forLanguageTag"], "java.util.Locale"),
        ("java.util.ResourceBundle", &["getBundle"], "java.util.ResourceBundle"),
        ("java.util.Scanner", &["nextLine", "next"], STRING),
        ("java.lang.System", &["console"], "java.io.Console"),
        ("java.io.BufferedReader", &["readLine"], STRING),
        ("java.io.BufferedReader", &["lines"], STREAM),
        ("java.time.format.DateTimeFormatter", &["ofPattern", "withZone", "withLocale"], "java.time.format.DateTimeFormatter"),
        ("java.time.ZoneId", &["of", "systemDefault"], "java.time.ZoneId"),
        ("java.time.LocalDateTime", &["atZone"], "java.time.ZonedDateTime"),
        ("java.time.Instant", &["atZone"], "java.time.ZonedDateTime"),
        ("java.time.LocalDate", &["atTime"], "java.time.LocalDateTime"),
        ("java.time.LocalDate", &["atStartOfDay"], "java.time.LocalDateTime"),
        ("java.time.LocalDateTime", &["toLocalDate"], "java.time.LocalDate"),
        ("java.time.LocalDateTime", &["toLocalTime"], "java.time.LocalTime"),
        ("java.time.Period", &["between"], "java.time.Period"),
        ("java.time.Duration", &["between"], "java.time.Duration"),
        ("javax.persistence.EntityManager", &["createQuery", "createNamedQuery", "createNativeQuery"], "javax.persistence.Query"),
        ("javax.persistence.EntityManager", &["getTransaction"], "javax.persistence.EntityTransaction"),
        ("javax.persistence.EntityManagerFactory", &["createEntityManager"], "javax.persistence.EntityManager"),
        ("javax.persistence.Persistence", &["createEntityManagerFactory"], "javax.persistence.EntityManagerFactory"),
    ];
    for (recv, methods, ret) in table {
        if *recv == receiver && methods.contains(&method) {
            return Some(ret);
        }
        if let Some(jakarta) = receiver.strip_prefix("jakarta.") {
            if recv.strip_prefix("javax.") == Some(jakarta) && methods.contains(&method) {
                return Some(ret);
            }
        }
    }
    // fluent java.time values: now/of/parse/plus*/minus*/with* keep their type
    if receiver.starts_with("java.time.")
        && ["now", "of", "parse", "plus", "minus", "with", "from", "ofEpoch", "truncatedTo"]
            .iter()
            .any(|p| method.starts_with(p))
    {
        return JAVA_TIME_VALUES.iter().find(|t| **t == receiver).copied();
    }
    None
}

const JAVA_TIME_VALUES: &[&str] = &[
    "java.time.LocalDate", "java.time.LocalTime", "java.time.LocalDateTime", "java.time.Instant",
    "java.time.Period", "java.time.Duration", "java.time.ZonedDateTime", "java.time.OffsetDateTime",
    "java.time.Year", "java.time.YearMonth",
];

fn static_field_type(owner: &str, field: &str) -> Option<&'static str> {
    match (owner, field) {
        ("java.lang.System", "out" | "err") => Some("java.io.PrintStream"),
        ("java.lang.System", "in") => Some("java.io.InputStream"),
        _ => None,
    }
}

/// Resolves names written in one file to fully qualified names.
///
/// Resolution order for a simple name: single-type imports, types declared
/// in the same file, types of the same package in the project, on-demand
/// imports (project types, then known platform names, then the sole platform
/// wildcard when no other wildcard could supply it), then `java.lang`.
/// Anything else is unresolved and treated as third-party.
pub struct Resolver<'a> {
    index: &'a SymbolIndex,
    known: &'a BTreeSet<String>,
    package: Option<String>,
    single: HashMap<String, String>,
    wildcards: Vec<String>,
    local_types: HashMap<String, String>,
    invocation_types: Vec<Option<String>>,
}

impl<'a> Resolver<'a> {
    /// `known` lists fully qualified platform names used to resolve on-demand
    /// imports; names outside it are only reachable via explicit imports.
    pub fn new(stream: &FactStream, index: &'a SymbolIndex, known: &'a BTreeSet<String>) -> Self {
        let package = stream.package().map(str::to_string);
        let mut single = HashMap::new();
        let mut wildcards = Vec::new();
        let mut local_types = HashMap::new();
        for fact in stream.iter() {
            match fact.kind {
                NodeKind::Import => {
                    if let Some(name) = &fact.name {
                        let simple = name.rsplit('.').next().unwrap_or(name);
                        single.entry(simple.to_string()).or_insert_with(|| name.clone());
                    }
                }
                NodeKind::WildcardImport => {
                    if let Some(name) = &fact.name {
                        wildcards.push(name.clone());
                    }
                }
                k if k.is_type_decl() => {
                    if let (Some(name), Some(path)) = (&fact.name, &fact.payload) {
                        let fq = match &package {
                            Some(p) => format!("{p}.{path}"),
                            None => path.clone(),
                        };
                        local_types.entry(name.clone()).or_insert(fq);
                    }
                }
                _ => {}
            }
        }
        let mut resolver = Self {
            index,
            known,
            package,
            single,
            wildcards,
            local_types,
            invocation_types: Vec::new(),
        };
        resolver.invocation_types = resolver.type_invocations(stream);
        resolver
    }

    fn type_invocations(&self, stream: &FactStream) -> Vec<Option<String>> {
        let mut types: Vec<Option<String>> = vec![None; stream.len()];
        for (i, fact) in stream.facts.iter().enumerate() {
            if fact.kind != NodeKind::MethodInvocation {
                continue;
            }
            let recv = fact
                .receiver
                .as_ref()
                .and_then(|r| self.receiver_type_with(r, &types));
            let method = fact.payload.as_deref().unwrap_or("");
            types[i] = recv
                .as_deref()
                .and_then(|r| return_type(r, method))
                .map(str::to_string);
        }
        types
    }

    fn receiver_type_with(&self, receiver: &Receiver, types: &[Option<String>]) -> Option<String> {
        match receiver {
            Receiver::Type(name) => self.resolve(name),
            Receiver::Invocation(i) => types.get(*i).cloned().flatten(),
            Receiver::StaticField { owner, field } => {
                let owner = self.resolve(owner)?;
                static_field_type(&owner, field).map(str::to_string)
            }
        }
    }

    /// Resolved static type of a method-invocation receiver.
    pub fn receiver_type(&self, receiver: &Receiver) -> Option<String> {
        self.receiver_type_with(receiver, &self.invocation_types)
    }

    /// Resolve a (possibly dotted) type name as written in the file.
    pub fn resolve(&self, name: &str) -> Option<String> {
        let name = name.trim_end_matches("[]");
        if name.is_empty() {
            return None;
        }
        match name.split_once('.') {
            None => self.resolve_simple(name),
            Some((head, rest)) => {
                if let Some(outer) = self.resolve_simple(head) {
                    return Some(format!("{outer}.{rest}"));
                }
                // a package-qualified name is already fully qualified
                head.chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_lowercase())
                    .then(|| name.to_string())
            }
        }
    }

    fn resolve_simple(&self, name: &str) -> Option<String> {
        if let Some(fq) = self.single.get(name) {
            return Some(fq.clone());
        }
        if let Some(fq) = self.local_types.get(name) {
            return Some(fq.clone());
        }
        let same_package = match &self.package {
            Some(p) => format!("{p}.{name}"),
            None => name.to_string(),
        };
        if self.index.project_types.contains(&same_package) {
            return Some(same_package);
        }
        for pkg in &self.wildcards {
            let fq = format!("{pkg}.{name}");
            if self.index.project_types.contains(&fq) || self.known.contains(&fq) {
                return Some(fq);
            }
        }
        if JAVA_LANG.binary_search(&name).is_ok() {
            return Some(format!("java.lang.{name}"));
        }
        let platform: Vec<&String> = self
            .wildcards
            .iter()
            .filter(|w| self.index.is_platform(&format!("{w}.")))
            .collect();
        if platform.len() == 1 && platform.len() == self.wildcards.len() {
            return Some(format!("{}.{name}", platform[0]));
        }
        None
    }

    pub fn index(&self) -> &SymbolIndex {
        self.index
    }

    /// Fully qualified names of the file's own package and imports, for
    /// diagnostics.
    pub fn imports(&self) -> BTreeMap<&str, &str> {
        self.single
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }
}
