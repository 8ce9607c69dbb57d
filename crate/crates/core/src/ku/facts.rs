//! The flattened, analysis-ready projection of a Java syntax tree.
//!
//! A [`FactStream`] is what every detection rule looks at. Facts are emitted in
//! source order (pre-order walk of the syntax tree); derived facts describing
//! declaration patterns (overloads, accessors, singletons) are emitted at the
//! offset of the declaration they describe.

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

/// Closed enumeration of syntax categories a fact can describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    // declarations
    PackageDecl,
    ClassDecl,
    InterfaceDecl,
    EnumDecl,
    AnnotationTypeDecl,
    RecordDecl,
    AnonymousClass,
    MethodDecl,
    ConstructorDecl,
    FieldDecl,
    LocalVarDecl,
    VariableDeclarator,
    Parameter,
    VarargsParameter,
    StaticInitializer,
    EnumConstant,
    // derived declaration patterns
    OverloadedMethod,
    OverloadedConstructor,
    AccessorMethod,
    ImmutableClass,
    SingletonClass,
    PolymorphicAssignment,
    ArrayTypeUse,
    MultiArrayTypeUse,
    // statements
    IfStatement,
    SwitchStatement,
    WhileStatement,
    DoWhileStatement,
    ForStatement,
    EnhancedForStatement,
    BreakStatement,
    ContinueStatement,
    ReturnStatement,
    TryStatement,
    TryWithResources,
    CatchClause,
    MultiCatchClause,
    FinallyClause,
    ThrowStatement,
    AssertStatement,
    SynchronizedStatement,
    ThisConstructorCall,
    SuperConstructorCall,
    // expressions
    Assignment,
    CompoundAssignment,
    UpdateExpr,
    BinaryExpr,
    EqualityExpr,
    UnaryExpr,
    ParenthesizedExpr,
    TernaryExpr,
    PrimitiveCast,
    ReferenceCast,
    InstanceOf,
    ArrayCreation,
    MultiArrayCreation,
    ArrayInitializer,
    ArrayAccess,
    Lambda,
    MethodReference,
    MethodInvocation,
    ObjectCreation,
    SuperMemberAccess,
    StringLiteral,
    // annotations and imports
    Annotation,
    Import,
    StaticImport,
    WildcardImport,
    // type references, by syntactic role
    ExtendsRef,
    ImplementsRef,
    VariableTypeRef,
    ParameterTypeRef,
    ReturnTypeRef,
    CreationTypeRef,
    CastTypeRef,
    ThrowsRef,
    CatchTypeRef,
    TypeArgumentRef,
    StaticReceiverRef,
    OtherTypeRef,
}

impl NodeKind {
    pub fn is_type_ref(self) -> bool {
        use NodeKind::*;
        matches!(
            self,
            ExtendsRef
                | ImplementsRef
                | VariableTypeRef
                | ParameterTypeRef
                | ReturnTypeRef
                | CreationTypeRef
                | CastTypeRef
                | ThrowsRef
                | CatchTypeRef
                | TypeArgumentRef
                | StaticReceiverRef
                | OtherTypeRef
        )
    }

    pub fn is_type_decl(self) -> bool {
        use NodeKind::*;
        matches!(
            self,
            ClassDecl | InterfaceDecl | EnumDecl | AnnotationTypeDecl | RecordDecl
        )
    }

    pub fn is_import(self) -> bool {
        matches!(
            self,
            NodeKind::Import | NodeKind::StaticImport | NodeKind::WildcardImport
        )
    }
}

bitflags! {
    /// Modifiers plus a few syntactic properties that rules can test for.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
    pub struct FactFlags: u32 {
        const PUBLIC = 1 << 0;
        const PROTECTED = 1 << 1;
        const PRIVATE = 1 << 2;
        const STATIC = 1 << 3;
        const FINAL = 1 << 4;
        const ABSTRACT = 1 << 5;
        const SYNCHRONIZED = 1 << 6;
        const NATIVE = 1 << 7;
        const TRANSIENT = 1 << 8;
        const VOLATILE = 1 << 9;
        const DEFAULT = 1 << 10;
        const STRICTFP = 1 << 11;
        /// Method or constructor declares at least one parameter.
        const HAS_PARAMS = 1 << 12;
        /// Method declares a non-void return type.
        const RETURNS_VALUE = 1 << 13;
        /// Declaration carries type parameters.
        const GENERIC = 1 << 14;
        /// Type declared inside another type's body.
        const NESTED = 1 << 15;
        /// Type declared inside a method or initializer body.
        const LOCAL = 1 << 16;
        /// Member of an enum body.
        const IN_ENUM = 1 << 17;
        /// Declaration annotated with `@Override`.
        const OVERRIDE = 1 << 18;
    }
}

/// Flag names as they appear in ruleset documents.
pub const FLAG_NAMES: &[(&str, FactFlags)] = &[
    ("public", FactFlags::PUBLIC),
    ("protected", FactFlags::PROTECTED),
    ("private", FactFlags::PRIVATE),
    ("static", FactFlags::STATIC),
    ("final", FactFlags::FINAL),
    ("abstract", FactFlags::ABSTRACT),
    ("synchronized", FactFlags::SYNCHRONIZED),
    ("native", FactFlags::NATIVE),
    ("transient", FactFlags::TRANSIENT),
    ("volatile", FactFlags::VOLATILE),
    ("default", FactFlags::DEFAULT),
    ("strictfp", FactFlags::STRICTFP),
    ("has_params", FactFlags::HAS_PARAMS),
    ("returns_value", FactFlags::RETURNS_VALUE),
    ("generic", FactFlags::GENERIC),
    ("nested", FactFlags::NESTED),
    ("local", FactFlags::LOCAL),
    ("in_enum", FactFlags::IN_ENUM),
    ("override", FactFlags::OVERRIDE),
];

pub fn flag_from_name(name: &str) -> Option<FactFlags> {
    FLAG_NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| *f)
}

/// Static type of the expression a method is invoked on, as far as the
/// parser can tell without type checking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Receiver {
    /// A type name as written in source (declared type of a variable, a
    /// static receiver, a literal's type, or the type of a `new` expression).
    Type(String),
    /// The result of another invocation, by index into the same stream.
    Invocation(usize),
    /// A static field of a named type, e.g. `System.out`.
    StaticField { owner: String, field: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fact {
    pub kind: NodeKind,
    /// Dotted name as written: declared name for declarations, referenced
    /// type for type references and annotations, imported name for imports.
    pub name: Option<String>,
    pub offset: usize,
    /// Token text: method name for invocations and declarations, operator
    /// for operator expressions.
    pub payload: Option<String>,
    pub flags: FactFlags,
    pub receiver: Option<Receiver>,
}

impl Fact {
    pub fn new(kind: NodeKind, offset: usize) -> Self {
        Self {
            kind,
            name: None,
            offset,
            payload: None,
            flags: FactFlags::empty(),
            receiver: None,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_payload(mut self, payload: impl Into<String>) -> Self {
        self.payload = Some(payload.into());
        self
    }

    pub fn with_flags(mut self, flags: FactFlags) -> Self {
        self.flags = flags;
        self
    }
}

/// Ordered facts of one source file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactStream {
    pub facts: Vec<Fact>,
    /// Byte length of the source the facts were taken from.
    pub source_len: usize,
}

impl FactStream {
    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.facts.iter().filter(|f| f.kind == kind).count()
    }

    /// Package declared by the file, if any.
    pub fn package(&self) -> Option<&str> {
        self.facts
            .iter()
            .find(|f| f.kind == NodeKind::PackageDecl)
            .and_then(|f| f.name.as_deref())
    }
}
