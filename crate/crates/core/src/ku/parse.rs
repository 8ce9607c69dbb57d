//! Java source to [`FactStream`].
//!
//! Parsing is delegated to the tree-sitter Java grammar; this module walks the
//! resulting tree and projects it onto the closed [`NodeKind`] enumeration.
//! Alongside the walk it keeps a light scope table (variable name to declared
//! type) so that method invocations can carry the static type of their
//! receiver when it is evident from declarations.

use std::collections::{BTreeMap, HashMap, HashSet};

use tree_sitter::{Node, Parser};

use super::facts::{Fact, FactFlags, FactStream, NodeKind, Receiver};
use super::KuError;

/// Parse one Java compilation unit.
///
/// Any syntax error reported by the grammar makes the whole file unparseable;
/// the caller decides whether to skip it.
pub fn parse_source(text: &str) -> Result<FactStream, KuError> {
    parse_named("<memory>", text)
}

/// Like [`parse_source`], but errors carry `file` for diagnostics.
pub fn parse_named(file: &str, text: &str) -> Result<FactStream, KuError> {
    let mut parser = Parser::new();
    parser
        .set_language(&tree_sitter_java::LANGUAGE.into())
        .expect("bundled Java grammar is ABI compatible");
    let tree = parser.parse(text, None).ok_or_else(|| KuError::Parse {
        file: file.to_string(),
        offset: 0,
        message: "parser produced no tree".into(),
    })?;
    let root = tree.root_node();
    if root.has_error() {
        let (offset, message) = first_error(root);
        return Err(KuError::Parse {
            file: file.to_string(),
            offset,
            message,
        });
    }
    let mut walker = Walker::new(text);
    walker.visit(root);
    let mut stream = FactStream {
        facts: walker.facts,
        source_len: text.len(),
    };
    for fact in &mut stream.facts {
        debug_assert!(fact.offset < stream.source_len.max(1));
        fact.offset = fact.offset.min(stream.source_len.saturating_sub(1));
    }
    Ok(stream)
}

fn first_error(node: Node) -> (usize, String) {
    if node.is_error() {
        return (node.start_byte(), "syntax error".into());
    }
    if node.is_missing() {
        return (node.start_byte(), format!("missing `{}`", node.kind()));
    }
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        if child.has_error() || child.is_missing() {
            return first_error(child);
        }
    }
    (node.start_byte(), "syntax error".into())
}

/// Per-type-body bookkeeping needed for derived facts.
struct TypeCtx {
    is_enum: bool,
    method_names: HashMap<String, usize>,
    constructor_count: usize,
}

struct Walker<'a> {
    src: &'a str,
    facts: Vec<Fact>,
    scopes: Vec<HashMap<String, String>>,
    type_params: Vec<HashSet<String>>,
    types: Vec<TypeCtx>,
    /// Depth of method/constructor/initializer bodies currently open.
    body_depth: usize,
    /// Static imports: member name -> owning type.
    static_members: BTreeMap<String, String>,
    /// Fact index of each method invocation, keyed by syntax node id.
    invocation_facts: HashMap<usize, usize>,
    /// Names of the enclosing type declarations, outermost first.
    type_path: Vec<String>,
}

const CONDITION_PARENTS: &[&str] = &[
    "if_statement",
    "while_statement",
    "do_statement",
    "switch_expression",
    "synchronized_statement",
];

fn is_primitive(kind: &str) -> bool {
    matches!(kind, "integral_type" | "floating_point_type" | "boolean_type")
}

fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

fn simple_name(name: &str) -> &str {
    name.rsplit('.').next().unwrap_or(name)
}

impl<'a> Walker<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            facts: Vec::new(),
            scopes: vec![HashMap::new()],
            type_params: Vec::new(),
            types: Vec::new(),
            body_depth: 0,
            static_members: BTreeMap::new(),
            invocation_facts: HashMap::new(),
            type_path: Vec::new(),
        }
    }

    fn text(&self, node: Node) -> &'a str {
        &self.src[node.byte_range()]
    }

    fn push(&mut self, fact: Fact) -> usize {
        self.facts.push(fact);
        self.facts.len() - 1
    }

    fn children<'t>(node: Node<'t>) -> Vec<Node<'t>> {
        let mut cursor = node.walk();
        node.children(&mut cursor).collect()
    }

    fn named_children<'t>(node: Node<'t>) -> Vec<Node<'t>> {
        let mut cursor = node.walk();
        node.named_children(&mut cursor).collect()
    }

    fn visit_children(&mut self, node: Node) {
        for child in Self::named_children(node) {
            self.visit(child);
        }
    }

    fn declare(&mut self, name: &str, ty: String) {
        if let Some(scope) = self.scopes.last_mut() {
            scope.insert(name.to_string(), ty);
        }
    }

    fn lookup(&self, name: &str) -> Option<&str> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name))
            .map(String::as_str)
    }

    fn is_type_param(&self, name: &str) -> bool {
        self.type_params.iter().any(|s| s.contains(name))
    }

    fn with_scope<F: FnOnce(&mut Self)>(&mut self, f: F) {
        self.scopes.push(HashMap::new());
        f(self);
        self.scopes.pop();
    }

    // ---- modifiers ------------------------------------------------------

    fn modifiers_of(&mut self, decl: Node) -> (FactFlags, Vec<String>) {
        let mut flags = FactFlags::empty();
        let mut annotations = Vec::new();
        for child in Self::children(decl) {
            if child.kind() != "modifiers" {
                continue;
            }
            for m in Self::children(child) {
                match m.kind() {
                    "public" => flags |= FactFlags::PUBLIC,
                    "protected" => flags |= FactFlags::PROTECTED,
                    "private" => flags |= FactFlags::PRIVATE,
                    "static" => flags |= FactFlags::STATIC,
                    "final" => flags |= FactFlags::FINAL,
                    "abstract" => flags |= FactFlags::ABSTRACT,
                    "synchronized" => flags |= FactFlags::SYNCHRONIZED,
                    "native" => flags |= FactFlags::NATIVE,
                    "transient" => flags |= FactFlags::TRANSIENT,
                    "volatile" => flags |= FactFlags::VOLATILE,
                    "default" => flags |= FactFlags::DEFAULT,
                    "strictfp" => flags |= FactFlags::STRICTFP,
                    "marker_annotation" | "annotation" => {
                        if let Some(name) = m.child_by_field_name("name") {
                            annotations.push(self.text(name).to_string());
                        }
                    }
                    _ => {}
                }
            }
        }
        if annotations
            .iter()
            .any(|a| a == "Override" || a == "java.lang.Override")
        {
            flags |= FactFlags::OVERRIDE;
        }
        (flags, annotations)
    }

    /// Emit annotation facts found in a declaration's modifiers.
    fn visit_modifiers(&mut self, decl: Node) {
        for child in Self::children(decl) {
            if child.kind() == "modifiers" {
                for m in Self::named_children(child) {
                    self.visit(m);
                }
            }
        }
    }

    // ---- types ----------------------------------------------------------

    /// Dotted name of a type node with generics and annotations stripped.
    fn type_name(&self, node: Node) -> Option<String> {
        match node.kind() {
            "type_identifier" | "identifier" => Some(self.text(node).to_string()),
            "scoped_type_identifier" | "scoped_identifier" => {
                let parts: Vec<String> = Self::named_children(node)
                    .into_iter()
                    .filter_map(|c| self.type_name(c))
                    .collect();
                (!parts.is_empty()).then(|| parts.join("."))
            }
            "generic_type" => Self::named_children(node)
                .into_iter()
                .find(|c| c.kind() != "type_arguments")
                .and_then(|c| self.type_name(c)),
            "annotated_type" => Self::named_children(node)
                .into_iter()
                .rev()
                .find(|c| !c.kind().ends_with("annotation"))
                .and_then(|c| self.type_name(c)),
            "array_type" => node
                .child_by_field_name("element")
                .and_then(|e| self.type_name(e))
                .map(|n| format!("{n}[]")),
            _ => None,
        }
    }

    fn array_dims(&self, node: Node) -> usize {
        match node.kind() {
            "array_type" => node
                .child_by_field_name("dimensions")
                .map(|d| self.text(d).matches('[').count())
                .unwrap_or(1),
            _ => 0,
        }
    }

    /// Emit type-reference facts for every class type mentioned in `node`.
    fn emit_type(&mut self, node: Node, role: NodeKind) {
        match node.kind() {
            "type_identifier" | "scoped_type_identifier" => {
                if let Some(name) = self.type_name(node) {
                    if name == "var" || self.is_type_param(&name) {
                        return;
                    }
                    self.push(Fact::new(role, node.start_byte()).named(name));
                }
            }
            "generic_type" => {
                for child in Self::named_children(node) {
                    if child.kind() == "type_arguments" {
                        for arg in Self::named_children(child) {
                            self.emit_type(arg, NodeKind::TypeArgumentRef);
                        }
                    } else {
                        self.emit_type(child, role);
                    }
                }
            }
            "array_type" => {
                if let Some(e) = node.child_by_field_name("element") {
                    self.emit_type(e, role);
                }
            }
            "annotated_type" => {
                for child in Self::named_children(node) {
                    if child.kind().ends_with("annotation") {
                        self.visit(child);
                    } else {
                        self.emit_type(child, role);
                    }
                }
            }
            "wildcard" | "type_bound" | "type_list" | "catch_type" | "super_interfaces"
            | "extends_interfaces" | "superclass" | "throws" => {
                for child in Self::named_children(node) {
                    self.emit_type(child, role);
                }
            }
            _ => {}
        }
    }

    fn type_parameter_names(&self, decl: Node) -> HashSet<String> {
        let mut names = HashSet::new();
        if let Some(tp) = decl.child_by_field_name("type_parameters") {
            for p in Self::named_children(tp) {
                if let Some(id) = Self::named_children(p)
                    .into_iter()
                    .find(|c| c.kind() == "type_identifier" || c.kind() == "identifier")
                {
                    names.insert(self.text(id).to_string());
                }
            }
        }
        names
    }

    fn emit_type_parameter_bounds(&mut self, decl: Node) {
        if let Some(tp) = decl.child_by_field_name("type_parameters") {
            for p in Self::named_children(tp) {
                for c in Self::named_children(p) {
                    if c.kind() == "type_bound" {
                        self.emit_type(c, NodeKind::OtherTypeRef);
                    }
                }
            }
        }
    }

    // ---- dispatch -------------------------------------------------------

    fn visit(&mut self, node: Node) {
        let at = node.start_byte();
        match node.kind() {
            "package_declaration" => {
                if let Some(name) = Self::named_children(node)
                    .into_iter()
                    .find(|c| matches!(c.kind(), "scoped_identifier" | "identifier"))
                {
                    let name = self.text(name).to_string();
                    self.push(Fact::new(NodeKind::PackageDecl, at).named(name));
                }
            }
            "import_declaration" => self.visit_import(node),
            "class_declaration"
            | "interface_declaration"
            | "enum_declaration"
            | "annotation_type_declaration"
            | "record_declaration" => self.visit_type_decl(node),
            "field_declaration" | "constant_declaration" => self.visit_field(node),
            "method_declaration" => self.visit_method(node),
            "constructor_declaration" | "compact_constructor_declaration" => {
                self.visit_constructor(node)
            }
            "static_initializer" => {
                self.push(Fact::new(NodeKind::StaticInitializer, at).with_flags(FactFlags::STATIC));
                self.body_depth += 1;
                self.visit_children(node);
                self.body_depth -= 1;
            }
            "enum_constant" => {
                let name = node
                    .child_by_field_name("name")
                    .map(|n| self.text(n).to_string())
                    .unwrap_or_default();
                self.push(Fact::new(NodeKind::EnumConstant, at).named(name));
                if let Some(args) = node.child_by_field_name("arguments") {
                    self.visit(args);
                }
                if let Some(body) = node.child_by_field_name("body") {
                    self.visit_anonymous_body(body);
                }
            }
            "block" | "constructor_body" | "switch_block" => {
                self.with_scope(|w| w.visit_children(node));
            }
            "local_variable_declaration" => self.visit_local(node),
            "if_statement" => self.simple(node, NodeKind::IfStatement),
            "switch_expression" => self.simple(node, NodeKind::SwitchStatement),
            "while_statement" => self.simple(node, NodeKind::WhileStatement),
            "do_statement" => self.simple(node, NodeKind::DoWhileStatement),
            "for_statement" => {
                self.push(Fact::new(NodeKind::ForStatement, at));
                self.with_scope(|w| w.visit_children(node));
            }
            "enhanced_for_statement" => {
                self.push(Fact::new(NodeKind::EnhancedForStatement, at));
                self.with_scope(|w| {
                    let (flags, _) = w.modifiers_of(node);
                    w.visit_modifiers(node);
                    if let (Some(ty), Some(name)) = (
                        node.child_by_field_name("type"),
                        node.child_by_field_name("name"),
                    ) {
                        w.emit_type(ty, NodeKind::VariableTypeRef);
                        let tn = w.type_name(ty).unwrap_or_default();
                        let var = w.text(name).to_string();
                        w.push(
                            Fact::new(NodeKind::VariableDeclarator, name.start_byte())
                                .named(var.clone())
                                .with_flags(flags),
                        );
                        w.declare(&var, tn);
                    }
                    if let Some(v) = node.child_by_field_name("value") {
                        w.visit(v);
                    }
                    if let Some(b) = node.child_by_field_name("body") {
                        w.visit(b);
                    }
                });
            }
            "break_statement" => self.simple(node, NodeKind::BreakStatement),
            "continue_statement" => self.simple(node, NodeKind::ContinueStatement),
            "return_statement" => self.simple(node, NodeKind::ReturnStatement),
            "throw_statement" => self.simple(node, NodeKind::ThrowStatement),
            "assert_statement" => self.simple(node, NodeKind::AssertStatement),
            "synchronized_statement" => self.simple(node, NodeKind::SynchronizedStatement),
            "try_statement" => self.simple(node, NodeKind::TryStatement),
            "try_with_resources_statement" => {
                self.push(Fact::new(NodeKind::TryWithResources, at));
                self.with_scope(|w| w.visit_children(node));
            }
            "resource" => {
                if let Some(ty) = node.child_by_field_name("type") {
                    self.emit_type(ty, NodeKind::VariableTypeRef);
                    if let Some(name) = node.child_by_field_name("name") {
                        let tn = self.type_name(ty).unwrap_or_default();
                        let var = self.text(name).to_string();
                        self.push(
                            Fact::new(NodeKind::VariableDeclarator, name.start_byte())
                                .named(var.clone()),
                        );
                        self.declare(&var, tn);
                    }
                }
                if let Some(v) = node.child_by_field_name("value") {
                    self.visit(v);
                }
            }
            "catch_clause" => self.visit_catch(node),
            "finally_clause" => self.simple(node, NodeKind::FinallyClause),
            "explicit_constructor_invocation" => {
                let kind = match node.child_by_field_name("constructor").map(|c| c.kind()) {
                    Some("super") => NodeKind::SuperConstructorCall,
                    _ => NodeKind::ThisConstructorCall,
                };
                self.push(Fact::new(kind, at));
                if let Some(obj) = node.child_by_field_name("object") {
                    self.visit(obj);
                }
                if let Some(args) = node.child_by_field_name("arguments") {
                    self.visit(args);
                }
            }
            "assignment_expression" => {
                let op = node
                    .child_by_field_name("operator")
                    .map(|o| self.text(o).to_string())
                    .unwrap_or_else(|| "=".into());
                let kind = if op == "=" {
                    NodeKind::Assignment
                } else {
                    NodeKind::CompoundAssignment
                };
                self.push(Fact::new(kind, at).with_payload(op));
                self.visit_children(node);
            }
            "binary_expression" => {
                let op = node
                    .child_by_field_name("operator")
                    .map(|o| self.text(o).to_string())
                    .unwrap_or_default();
                let kind = if op == "==" || op == "!=" {
                    NodeKind::EqualityExpr
                } else {
                    NodeKind::BinaryExpr
                };
                self.push(Fact::new(kind, at).with_payload(op));
                self.visit_children(node);
            }
            "unary_expression" => {
                let op = node
                    .child_by_field_name("operator")
                    .map(|o| self.text(o).to_string())
                    .unwrap_or_default();
                self.push(Fact::new(NodeKind::UnaryExpr, at).with_payload(op));
                self.visit_children(node);
            }
            "update_expression" => {
                let text = self.text(node);
                let op = if text.contains("++") { "++" } else { "--" };
                self.push(Fact::new(NodeKind::UpdateExpr, at).with_payload(op));
                self.visit_children(node);
            }
            "parenthesized_expression" => {
                let is_condition = node
                    .parent()
                    .is_some_and(|p| CONDITION_PARENTS.contains(&p.kind()));
                if !is_condition {
                    self.push(Fact::new(NodeKind::ParenthesizedExpr, at));
                }
                self.visit_children(node);
            }
            "ternary_expression" => self.simple(node, NodeKind::TernaryExpr),
            "cast_expression" => {
                if let Some(ty) = node.child_by_field_name("type") {
                    if is_primitive(ty.kind()) {
                        self.push(Fact::new(NodeKind::PrimitiveCast, at));
                    } else {
                        self.push(Fact::new(NodeKind::ReferenceCast, at));
                        self.emit_type(ty, NodeKind::CastTypeRef);
                    }
                }
                if let Some(v) = node.child_by_field_name("value") {
                    self.visit(v);
                }
            }
            "instanceof_expression" => {
                self.push(Fact::new(NodeKind::InstanceOf, at));
                if let Some(l) = node.child_by_field_name("left") {
                    self.visit(l);
                }
                if let Some(r) = node.child_by_field_name("right") {
                    self.emit_type(r, NodeKind::OtherTypeRef);
                }
                if let Some(p) = node.child_by_field_name("pattern") {
                    self.visit(p);
                }
            }
            "array_creation_expression" => {
                let mut dims = 0;
                for c in Self::children(node) {
                    match c.kind() {
                        "dimensions_expr" => dims += 1,
                        "dimensions" => dims += self.text(c).matches('[').count(),
                        _ => {}
                    }
                }
                let kind = if dims >= 2 {
                    NodeKind::MultiArrayCreation
                } else {
                    NodeKind::ArrayCreation
                };
                self.push(Fact::new(kind, at).with_payload(dims.to_string()));
                if let Some(ty) = node.child_by_field_name("type") {
                    self.emit_type(ty, NodeKind::CreationTypeRef);
                }
                for c in Self::named_children(node) {
                    if c.kind() == "dimensions_expr" {
                        self.visit_children(c);
                    }
                }
                if let Some(v) = node.child_by_field_name("value") {
                    self.visit_children(v);
                }
            }
            "array_initializer" => {
                let nested = node.parent().is_some_and(|p| {
                    matches!(p.kind(), "array_initializer" | "array_creation_expression")
                });
                if !nested {
                    self.push(Fact::new(NodeKind::ArrayInitializer, at));
                }
                self.visit_children(node);
            }
            "array_access" => self.simple(node, NodeKind::ArrayAccess),
            "lambda_expression" => {
                self.push(Fact::new(NodeKind::Lambda, at));
                self.with_scope(|w| {
                    if let Some(params) = w_params(node) {
                        for p in Walker::named_children(params) {
                            match p.kind() {
                                "identifier" => {
                                    let n = w.text(p).to_string();
                                    w.declare(&n, String::new());
                                }
                                "formal_parameter" => w.visit_parameter(p),
                                _ => {}
                            }
                        }
                    } else if let Some(p) = node.child_by_field_name("parameters") {
                        if p.kind() == "identifier" {
                            let n = w.text(p).to_string();
                            w.declare(&n, String::new());
                        }
                    }
                    if let Some(body) = node.child_by_field_name("body") {
                        w.visit(body);
                    }
                });
            }
            "method_reference" => {
                self.push(Fact::new(NodeKind::MethodReference, at));
                if let Some(first) = node.named_child(0) {
                    match first.kind() {
                        "identifier" => {
                            let name = self.text(first);
                            if self.lookup(name).is_none() && starts_upper(name) {
                                self.push(
                                    Fact::new(NodeKind::OtherTypeRef, first.start_byte())
                                        .named(name),
                                );
                            }
                        }
                        "type_identifier" | "scoped_type_identifier" | "generic_type"
                        | "array_type" => self.emit_type(first, NodeKind::OtherTypeRef),
                        "field_access" | "scoped_identifier" => {
                            if let Some(n) = self.qualified_type_text(first) {
                                self.push(
                                    Fact::new(NodeKind::OtherTypeRef, first.start_byte()).named(n),
                                );
                            } else {
                                self.visit(first);
                            }
                        }
                        _ => self.visit(first),
                    }
                }
            }
            "class_literal" => {
                if let Some(ty) = node.named_child(0) {
                    self.emit_type(ty, NodeKind::OtherTypeRef);
                }
            }
            "method_invocation" => self.visit_invocation(node),
            "object_creation_expression" => self.visit_creation(node),
            "field_access" => {
                if node
                    .child_by_field_name("object")
                    .is_some_and(|o| o.kind() == "super")
                {
                    self.push(Fact::new(NodeKind::SuperMemberAccess, at));
                }
                if let Some(obj) = node.child_by_field_name("object") {
                    if obj.kind() == "identifier" {
                        let name = self.text(obj);
                        if self.lookup(name).is_none() && starts_upper(name) {
                            self.push(
                                Fact::new(NodeKind::StaticReceiverRef, obj.start_byte())
                                    .named(name),
                            );
                        }
                    } else {
                        self.visit(obj);
                    }
                }
            }
            "string_literal" => self.push_leaf(NodeKind::StringLiteral, at),
            "marker_annotation" | "annotation" => {
                if let Some(name) = node.child_by_field_name("name") {
                    let name = self.text(name).to_string();
                    self.push(Fact::new(NodeKind::Annotation, at).named(name));
                }
                if let Some(args) = node.child_by_field_name("arguments") {
                    self.visit_children(args);
                }
            }
            "line_comment" | "block_comment" => {}
            _ => self.visit_children(node),
        }
    }

    fn push_leaf(&mut self, kind: NodeKind, at: usize) {
        self.push(Fact::new(kind, at));
    }

    fn simple(&mut self, node: Node, kind: NodeKind) {
        self.push(Fact::new(kind, node.start_byte()));
        self.visit_children(node);
    }

    fn visit_import(&mut self, node: Node) {
        let children = Self::children(node);
        let is_static = children.iter().any(|c| c.kind() == "static");
        let wildcard = children.iter().any(|c| c.kind() == "asterisk");
        let Some(name) = children
            .iter()
            .find(|c| matches!(c.kind(), "scoped_identifier" | "identifier"))
            .map(|c| self.text(*c).to_string())
        else {
            return;
        };
        let at = node.start_byte();
        if is_static {
            if !wildcard {
                if let Some((owner, member)) = name.rsplit_once('.') {
                    self.static_members
                        .insert(member.to_string(), owner.to_string());
                }
            }
            let payload = if wildcard { "*" } else { "" };
            self.push(
                Fact::new(NodeKind::StaticImport, at)
                    .named(name)
                    .with_payload(payload),
            );
        } else if wildcard {
            self.push(Fact::new(NodeKind::WildcardImport, at).named(name));
        } else {
            self.push(Fact::new(NodeKind::Import, at).named(name));
        }
    }

    fn visit_type_decl(&mut self, node: Node) {
        let at = node.start_byte();
        let kind = match node.kind() {
            "class_declaration" => NodeKind::ClassDecl,
            "interface_declaration" => NodeKind::InterfaceDecl,
            "enum_declaration" => NodeKind::EnumDecl,
            "annotation_type_declaration" => NodeKind::AnnotationTypeDecl,
            _ => NodeKind::RecordDecl,
        };
        let name = node
            .child_by_field_name("name")
            .map(|n| self.text(n).to_string())
            .unwrap_or_default();
        let (mut flags, _) = self.modifiers_of(node);
        if node.child_by_field_name("type_parameters").is_some() {
            flags |= FactFlags::GENERIC;
        }
        if self.body_depth > 0 {
            flags |= FactFlags::LOCAL;
        } else if !self.types.is_empty() {
            flags |= FactFlags::NESTED;
        }
        if self.types.last().is_some_and(|t| t.is_enum) {
            flags |= FactFlags::IN_ENUM;
        }
        self.type_path.push(name.clone());
        let path = self.type_path.join(".");
        self.push(
            Fact::new(kind, at)
                .named(name.clone())
                .with_payload(path)
                .with_flags(flags),
        );
        self.visit_modifiers(node);

        let params = self.type_parameter_names(node);
        self.type_params.push(params);
        self.emit_type_parameter_bounds(node);

        for child in Self::children(node) {
            match child.kind() {
                "superclass" => self.emit_type(child, NodeKind::ExtendsRef),
                "extends_interfaces" => self.emit_type(child, NodeKind::ExtendsRef),
                "super_interfaces" => self.emit_type(child, NodeKind::ImplementsRef),
                _ => {}
            }
        }

        let body = node.child_by_field_name("body");
        if let Some(body) = body {
            if kind == NodeKind::ClassDecl {
                self.emit_class_patterns(body, &name, flags, at);
            }
        }
        if let Some(params) = node.child_by_field_name("parameters") {
            // record components behave as private final fields
            self.scopes.push(HashMap::new());
            for p in Self::named_children(params) {
                if p.kind() == "formal_parameter" {
                    self.visit_parameter(p);
                }
            }
        } else {
            self.scopes.push(HashMap::new());
        }
        if let Some(body) = body {
            self.visit_type_body(body, kind == NodeKind::EnumDecl);
        }
        self.scopes.pop();
        self.type_params.pop();
        self.type_path.pop();
    }

    fn visit_anonymous_body(&mut self, body: Node) {
        self.scopes.push(HashMap::new());
        let saved = self.body_depth;
        self.body_depth = 0;
        self.visit_type_body(body, false);
        self.body_depth = saved;
        self.scopes.pop();
    }

    /// Visit members of a class/interface/enum body with field names in scope.
    fn visit_type_body(&mut self, body: Node, is_enum: bool) {
        let members = type_members(body);
        let mut ctx = TypeCtx {
            is_enum,
            method_names: HashMap::new(),
            constructor_count: 0,
        };
        for m in &members {
            match m.kind() {
                "method_declaration" => {
                    if let Some(n) = m.child_by_field_name("name") {
                        *ctx.method_names.entry(self.text(n).to_string()).or_default() += 1;
                    }
                }
                "constructor_declaration" | "compact_constructor_declaration" => {
                    ctx.constructor_count += 1
                }
                "field_declaration" | "constant_declaration" => {
                    if let Some(ty) = m.child_by_field_name("type") {
                        let tn = self.type_name(ty).unwrap_or_default();
                        for d in Self::named_children(*m) {
                            if d.kind() == "variable_declarator" {
                                if let Some(n) = d.child_by_field_name("name") {
                                    let n = self.text(n).to_string();
                                    self.declare(&n, tn.clone());
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        self.types.push(ctx);
        let saved = self.body_depth;
        self.body_depth = 0;
        for child in Self::named_children(body) {
            if child.kind() == "enum_body_declarations" {
                for m in Self::named_children(child) {
                    self.visit(m);
                }
            } else if child.kind() == "block" {
                // instance initializer
                self.body_depth += 1;
                self.visit(child);
                self.body_depth -= 1;
            } else {
                self.visit(child);
            }
        }
        self.body_depth = saved;
        self.types.pop();
    }

    /// Immutable-class and singleton-class patterns of a class body.
    fn emit_class_patterns(&mut self, body: Node, class_name: &str, flags: FactFlags, at: usize) {
        let members = type_members(body);
        let mut fields = 0usize;
        let mut all_private_final = true;
        let mut ctors = 0usize;
        let mut all_ctors_private = true;
        let mut has_self_static_field = false;
        let mut has_setter = false;
        for m in &members {
            match m.kind() {
                "field_declaration" => {
                    let (f, _) = self.modifiers_of(*m);
                    if f.contains(FactFlags::STATIC) {
                        let ty = m
                            .child_by_field_name("type")
                            .and_then(|t| self.type_name(t))
                            .unwrap_or_default();
                        if simple_name(&ty) == class_name {
                            has_self_static_field = true;
                        }
                        continue;
                    }
                    fields += 1;
                    if !f.contains(FactFlags::PRIVATE | FactFlags::FINAL) {
                        all_private_final = false;
                    }
                }
                "constructor_declaration" => {
                    ctors += 1;
                    let (f, _) = self.modifiers_of(*m);
                    if !f.contains(FactFlags::PRIVATE) {
                        all_ctors_private = false;
                    }
                }
                "method_declaration" => {
                    if let Some(n) = m.child_by_field_name("name") {
                        if is_setter_name(self.text(n)) {
                            has_setter = true;
                        }
                    }
                }
                _ => {}
            }
        }
        if flags.contains(FactFlags::FINAL) && fields > 0 && all_private_final && ctors > 0 && !has_setter
        {
            self.push(Fact::new(NodeKind::ImmutableClass, at).named(class_name));
        }
        if ctors > 0 && all_ctors_private && has_self_static_field {
            self.push(Fact::new(NodeKind::SingletonClass, at).named(class_name));
        }
    }

    fn current_type_flags(&self) -> FactFlags {
        if self.types.last().is_some_and(|t| t.is_enum) {
            FactFlags::IN_ENUM
        } else {
            FactFlags::empty()
        }
    }

    fn visit_field(&mut self, node: Node) {
        let at = node.start_byte();
        let (flags, _) = self.modifiers_of(node);
        self.push(Fact::new(NodeKind::FieldDecl, at).with_flags(flags));
        self.visit_modifiers(node);
        let ty = node.child_by_field_name("type");
        if let Some(ty) = ty {
            self.emit_type(ty, NodeKind::VariableTypeRef);
        }
        self.visit_declarators(node, ty, flags, false);
    }

    fn visit_local(&mut self, node: Node) {
        let at = node.start_byte();
        let (flags, _) = self.modifiers_of(node);
        self.push(Fact::new(NodeKind::LocalVarDecl, at).with_flags(flags));
        self.visit_modifiers(node);
        let ty = node.child_by_field_name("type");
        if let Some(ty) = ty {
            self.emit_type(ty, NodeKind::VariableTypeRef);
        }
        self.visit_declarators(node, ty, flags, true);
    }

    fn visit_declarators(&mut self, decl: Node, ty: Option<Node>, flags: FactFlags, local: bool) {
        let type_text = ty.and_then(|t| self.type_name(t)).unwrap_or_default();
        let base_dims = ty.map(|t| self.array_dims(t)).unwrap_or(0);
        let is_prim = ty.is_some_and(|t| is_primitive(t.kind()));
        for d in Self::named_children(decl) {
            if d.kind() != "variable_declarator" {
                continue;
            }
            let at = d.start_byte();
            let name = d
                .child_by_field_name("name")
                .map(|n| self.text(n).to_string())
                .unwrap_or_default();
            let dims = base_dims
                + d.child_by_field_name("dimensions")
                    .map(|x| self.text(x).matches('[').count())
                    .unwrap_or(0);
            self.push(
                Fact::new(NodeKind::VariableDeclarator, at)
                    .named(name.clone())
                    .with_flags(flags),
            );
            match dims {
                0 => {}
                1 => {
                    self.push(Fact::new(NodeKind::ArrayTypeUse, at).named(name.clone()));
                }
                _ => {
                    self.push(Fact::new(NodeKind::MultiArrayTypeUse, at).named(name.clone()));
                }
            }
            let value = d.child_by_field_name("value");
            if let Some(v) = value {
                if v.kind() == "object_creation_expression"
                    && dims == 0
                    && !is_prim
                    && type_text != "var"
                    && !v
                        .named_children(&mut v.walk())
                        .any(|c| c.kind() == "class_body")
                {
                    let created = v
                        .child_by_field_name("type")
                        .and_then(|t| self.type_name(t))
                        .unwrap_or_default();
                    if !created.is_empty()
                        && !type_text.is_empty()
                        && simple_name(&created) != simple_name(&type_text)
                    {
                        self.push(
                            Fact::new(NodeKind::PolymorphicAssignment, at)
                                .named(type_text.clone())
                                .with_payload(created),
                        );
                    }
                }
            }
            let declared = if dims > 0 && !type_text.ends_with("[]") {
                format!("{type_text}[]")
            } else {
                type_text.clone()
            };
            if local {
                // visible to its own initializer and following statements
                self.declare(&name, declared);
            }
            if let Some(v) = value {
                self.visit(v);
            }
        }
    }

    fn visit_parameter(&mut self, p: Node) {
        let at = p.start_byte();
        let (flags, _) = self.modifiers_of(p);
        self.visit_modifiers(p);
        let kind = if p.kind() == "spread_parameter" {
            NodeKind::VarargsParameter
        } else {
            NodeKind::Parameter
        };
        let ty = p
            .child_by_field_name("type")
            .or_else(|| {
                Self::named_children(p)
                    .into_iter()
                    .find(|c| c.kind() != "modifiers" && c.kind() != "variable_declarator")
            });
        let name = p
            .child_by_field_name("name")
            .or_else(|| {
                Self::named_children(p)
                    .into_iter()
                    .find(|c| c.kind() == "variable_declarator")
                    .and_then(|d| d.child_by_field_name("name"))
            })
            .map(|n| self.text(n).to_string())
            .unwrap_or_default();
        self.push(Fact::new(kind, at).named(name.clone()).with_flags(flags));
        let mut tn = String::new();
        if let Some(ty) = ty {
            self.emit_type(ty, NodeKind::ParameterTypeRef);
            tn = self.type_name(ty).unwrap_or_default();
        }
        if kind == NodeKind::VarargsParameter {
            tn.push_str("[]");
        }
        self.declare(&name, tn);
    }

    fn visit_params_and_throws(&mut self, node: Node) -> usize {
        let mut count = 0;
        if let Some(params) = node.child_by_field_name("parameters") {
            for p in Self::named_children(params) {
                if matches!(p.kind(), "formal_parameter" | "spread_parameter") {
                    count += 1;
                    self.visit_parameter(p);
                }
            }
        }
        for c in Self::children(node) {
            if c.kind() == "throws" {
                self.emit_type(c, NodeKind::ThrowsRef);
            }
        }
        count
    }

    fn visit_method(&mut self, node: Node) {
        let at = node.start_byte();
        let name = node
            .child_by_field_name("name")
            .map(|n| self.text(n).to_string())
            .unwrap_or_default();
        let (mut flags, _) = self.modifiers_of(node);
        flags |= self.current_type_flags();
        let param_count = node
            .child_by_field_name("parameters")
            .map(|p| {
                Self::named_children(p)
                    .into_iter()
                    .filter(|c| matches!(c.kind(), "formal_parameter" | "spread_parameter"))
                    .count()
            })
            .unwrap_or(0);
        if param_count > 0 {
            flags |= FactFlags::HAS_PARAMS;
        }
        let ret = node.child_by_field_name("type");
        if ret.is_some_and(|t| t.kind() != "void_type") {
            flags |= FactFlags::RETURNS_VALUE;
        }
        if node.child_by_field_name("type_parameters").is_some() {
            flags |= FactFlags::GENERIC;
        }
        self.push(
            Fact::new(NodeKind::MethodDecl, at)
                .named(name.clone())
                .with_payload(name.clone())
                .with_flags(flags),
        );
        if self
            .types
            .last()
            .and_then(|t| t.method_names.get(&name))
            .is_some_and(|&n| n >= 2)
        {
            self.push(Fact::new(NodeKind::OverloadedMethod, at).named(name.clone()));
        }
        let body = node.child_by_field_name("body");
        if let Some(b) = body {
            if is_accessor(self, &name, param_count, flags, b) {
                self.push(Fact::new(NodeKind::AccessorMethod, at).named(name.clone()));
            }
        }
        self.visit_modifiers(node);
        self.type_params.push(self.type_parameter_names(node));
        self.emit_type_parameter_bounds(node);
        if let Some(ret) = ret {
            self.emit_type(ret, NodeKind::ReturnTypeRef);
        }
        self.scopes.push(HashMap::new());
        self.visit_params_and_throws(node);
        if let Some(b) = body {
            self.body_depth += 1;
            self.visit(b);
            self.body_depth -= 1;
        }
        self.scopes.pop();
        self.type_params.pop();
    }

    fn visit_constructor(&mut self, node: Node) {
        let at = node.start_byte();
        let name = node
            .child_by_field_name("name")
            .map(|n| self.text(n).to_string())
            .unwrap_or_default();
        let (mut flags, _) = self.modifiers_of(node);
        flags |= self.current_type_flags();
        let has_params = node.child_by_field_name("parameters").is_some_and(|p| {
            Self::named_children(p)
                .into_iter()
                .any(|c| matches!(c.kind(), "formal_parameter" | "spread_parameter"))
        });
        if has_params {
            flags |= FactFlags::HAS_PARAMS;
        }
        self.push(
            Fact::new(NodeKind::ConstructorDecl, at)
                .named(name.clone())
                .with_flags(flags),
        );
        if self.types.last().is_some_and(|t| t.constructor_count >= 2) {
            self.push(Fact::new(NodeKind::OverloadedConstructor, at).named(name));
        }
        self.visit_modifiers(node);
        self.type_params.push(self.type_parameter_names(node));
        self.scopes.push(HashMap::new());
        self.visit_params_and_throws(node);
        if let Some(b) = node.child_by_field_name("body") {
            self.body_depth += 1;
            self.visit(b);
            self.body_depth -= 1;
        }
        self.scopes.pop();
        self.type_params.pop();
    }

    fn visit_catch(&mut self, node: Node) {
        let at = node.start_byte();
        self.with_scope(|w| {
            let param = Walker::named_children(node)
                .into_iter()
                .find(|c| c.kind() == "catch_formal_parameter");
            let mut multi = false;
            if let Some(param) = param {
                if let Some(ct) = Walker::named_children(param)
                    .into_iter()
                    .find(|c| c.kind() == "catch_type")
                {
                    multi = Walker::named_children(ct).len() > 1;
                    let kind = if multi {
                        NodeKind::MultiCatchClause
                    } else {
                        NodeKind::CatchClause
                    };
                    w.push(Fact::new(kind, at));
                    w.emit_type(ct, NodeKind::CatchTypeRef);
                    if let Some(n) = param.child_by_field_name("name") {
                        let var = w.text(n).to_string();
                        let tn = if multi {
                            String::new()
                        } else {
                            Walker::named_children(ct)
                                .first()
                                .and_then(|t| w.type_name(*t))
                                .unwrap_or_default()
                        };
                        w.declare(&var, tn);
                    }
                }
            }
            let _ = multi;
            if let Some(body) = node.child_by_field_name("body") {
                w.visit(body);
            }
        });
    }

    /// Dotted text of a field access that reads as a qualified type name,
    /// e.g. `java.util.Collections`.
    fn qualified_type_text(&self, node: Node) -> Option<String> {
        let text: String = self
            .text(node)
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        let segments: Vec<&str> = text.split('.').collect();
        if segments.len() < 2
            || !segments
                .iter()
                .all(|s| !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '$'))
        {
            return None;
        }
        let first = segments[0];
        let last = segments[segments.len() - 1];
        (self.lookup(first).is_none()
            && first.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && starts_upper(last))
        .then_some(text)
    }

    fn visit_invocation(&mut self, node: Node) {
        let at = node.start_byte();
        let name = node
            .child_by_field_name("name")
            .map(|n| self.text(n).to_string())
            .unwrap_or_default();
        let receiver = match node.child_by_field_name("object") {
            None => self
                .static_members
                .get(&name)
                .map(|owner| Receiver::Type(owner.clone())),
            Some(obj) => self.receiver_of(obj),
        };
        let mut fact = Fact::new(NodeKind::MethodInvocation, at).with_payload(name.clone());
        fact.name = Some(name);
        fact.receiver = receiver;
        let idx = self.push(fact);
        self.invocation_facts.insert(node.id(), idx);
        if let Some(ta) = node.child_by_field_name("type_arguments") {
            for arg in Self::named_children(ta) {
                self.emit_type(arg, NodeKind::TypeArgumentRef);
            }
        }
        if let Some(args) = node.child_by_field_name("arguments") {
            self.visit(args);
        }
    }

    /// Visit the receiver expression and work out its static type.
    fn receiver_of(&mut self, obj: Node) -> Option<Receiver> {
        let at = obj.start_byte();
        match obj.kind() {
            "identifier" => {
                let name = self.text(obj);
                match self.lookup(name) {
                    Some(ty) if !ty.is_empty() && ty != "var" => Some(Receiver::Type(ty.to_string())),
                    Some(_) => None,
                    None if starts_upper(name) => {
                        self.push(Fact::new(NodeKind::StaticReceiverRef, at).named(name));
                        Some(Receiver::Type(name.to_string()))
                    }
                    None => None,
                }
            }
            "super" => {
                self.push(Fact::new(NodeKind::SuperMemberAccess, at));
                None
            }
            "this" => None,
            "string_literal" => {
                self.push(Fact::new(NodeKind::StringLiteral, at));
                Some(Receiver::Type("String".into()))
            }
            "field_access" => {
                let object = obj.child_by_field_name("object");
                let field = obj
                    .child_by_field_name("field")
                    .map(|f| self.text(f).to_string())
                    .unwrap_or_default();
                match object {
                    Some(o) if o.kind() == "this" => self
                        .lookup(&field)
                        .filter(|t| !t.is_empty())
                        .map(|t| Receiver::Type(t.to_string())),
                    Some(o) if o.kind() == "super" => {
                        self.push(Fact::new(NodeKind::SuperMemberAccess, o.start_byte()));
                        None
                    }
                    Some(o) => {
                        if let Some(q) = self.qualified_type_text(obj) {
                            self.push(Fact::new(NodeKind::StaticReceiverRef, at).named(q.clone()));
                            return Some(Receiver::Type(q));
                        }
                        if o.kind() == "identifier" {
                            let owner = self.text(o);
                            if self.lookup(owner).is_none() && starts_upper(owner) {
                                self.push(
                                    Fact::new(NodeKind::StaticReceiverRef, o.start_byte())
                                        .named(owner),
                                );
                                return Some(Receiver::StaticField {
                                    owner: owner.to_string(),
                                    field,
                                });
                            }
                        }
                        self.visit(obj);
                        None
                    }
                    None => None,
                }
            }
            "method_invocation" => {
                self.visit(obj);
                self.invocation_facts
                    .get(&obj.id())
                    .map(|&i| Receiver::Invocation(i))
            }
            "object_creation_expression" => {
                self.visit(obj);
                obj.child_by_field_name("type")
                    .and_then(|t| self.type_name(t))
                    .map(Receiver::Type)
            }
            "parenthesized_expression" => {
                let inner = obj.named_child(0);
                match inner {
                    Some(c) if c.kind() == "cast_expression" => {
                        self.push(Fact::new(NodeKind::ParenthesizedExpr, at));
                        self.visit(c);
                        c.child_by_field_name("type")
                            .and_then(|t| self.type_name(t))
                            .map(Receiver::Type)
                    }
                    _ => {
                        self.visit(obj);
                        None
                    }
                }
            }
            _ => {
                self.visit(obj);
                None
            }
        }
    }

    fn visit_creation(&mut self, node: Node) {
        let at = node.start_byte();
        let ty = node.child_by_field_name("type");
        let name = ty.and_then(|t| self.type_name(t)).unwrap_or_default();
        self.push(Fact::new(NodeKind::ObjectCreation, at).named(name));
        if let Some(ty) = ty {
            self.emit_type(ty, NodeKind::CreationTypeRef);
        }
        for c in Self::named_children(node) {
            match c.kind() {
                "argument_list" => self.visit(c),
                "class_body" => {
                    self.push(Fact::new(NodeKind::AnonymousClass, c.start_byte()));
                    self.visit_anonymous_body(c);
                }
                "type_arguments" => {
                    for arg in Self::named_children(c) {
                        self.emit_type(arg, NodeKind::TypeArgumentRef);
                    }
                }
                _ => {}
            }
        }
        // `outer.new Inner()`
        if let Some(first) = node.named_child(0) {
            if !matches!(
                first.kind(),
                "type_identifier"
                    | "scoped_type_identifier"
                    | "generic_type"
                    | "argument_list"
                    | "class_body"
                    | "type_arguments"
            ) && Some(first) != ty
            {
                self.visit(first);
            }
        }
    }
}

fn w_params(lambda: Node) -> Option<Node> {
    lambda
        .child_by_field_name("parameters")
        .filter(|p| matches!(p.kind(), "formal_parameters" | "inferred_parameters"))
}

fn type_members(body: Node) -> Vec<Node> {
    let mut out = Vec::new();
    let mut cursor = body.walk();
    for child in body.named_children(&mut cursor) {
        if child.kind() == "enum_body_declarations" {
            let mut c2 = child.walk();
            out.extend(child.named_children(&mut c2));
        } else {
            out.push(child);
        }
    }
    out
}

fn is_setter_name(name: &str) -> bool {
    name.strip_prefix("set").is_some_and(starts_upper)
}

fn is_getter_name(name: &str) -> bool {
    name.strip_prefix("get").is_some_and(starts_upper) || name.strip_prefix("is").is_some_and(starts_upper)
}

fn contains_kind(node: Node, kind: &str) -> bool {
    if node.kind() == kind {
        return true;
    }
    let mut cursor = node.walk();
    let found = node.named_children(&mut cursor).any(|c| contains_kind(c, kind));
    found
}

/// Getter: `getX()`/`isX()` without parameters returning a value from a body
/// containing a return. Setter: `setX(v)` with one parameter and an assignment.
fn is_accessor(_w: &Walker, name: &str, params: usize, flags: FactFlags, body: Node) -> bool {
    if is_getter_name(name) && params == 0 && flags.contains(FactFlags::RETURNS_VALUE) {
        return contains_kind(body, "return_statement");
    }
    if is_setter_name(name) && params == 1 {
        return contains_kind(body, "assignment_expression");
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<NodeKind> {
        parse_source(src).unwrap().facts.iter().map(|f| f.kind).collect()
    }

    #[test]
    fn empty_file_has_no_facts() {
        let s = parse_source("").unwrap();
        assert!(s.is_empty());
        assert_eq!(s.source_len, 0);
    }

    #[test]
    fn single_class_declaration() {
        let s = parse_source("class A {}").unwrap();
        let decls: Vec<_> = s.iter().filter(|f| f.kind == NodeKind::ClassDecl).collect();
        assert_eq!(decls.len(), 1);
        assert_eq!(decls[0].name.as_deref(), Some("A"));
    }

    #[test]
    fn one_for_statement() {
        let s = parse_source("class A { void m(){ for(int i=0;i<3;i++){} } }").unwrap();
        assert_eq!(s.count(NodeKind::ForStatement), 1);
        assert_eq!(s.count(NodeKind::UpdateExpr), 1);
        assert_eq!(s.count(NodeKind::BinaryExpr), 1);
    }

    #[test]
    fn syntax_error_reports_offset() {
        let err = parse_source("class A { void m( }").unwrap_err();
        match err {
            KuError::Parse { offset, .. } => assert!(offset <= 19),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn offsets_within_source() {
        let src = "package p; import java.util.List; class A { List<String> xs; int f(int a) { return a; } }";
        let s = parse_source(src).unwrap();
        assert!(s.iter().all(|f| f.offset < src.len()));
    }

    #[test]
    fn abstract_flags_are_recorded() {
        let s = parse_source("abstract class A { abstract void m(); }").unwrap();
        let class = s.iter().find(|f| f.kind == NodeKind::ClassDecl).unwrap();
        assert!(class.flags.contains(FactFlags::ABSTRACT));
        let m = s.iter().find(|f| f.kind == NodeKind::MethodDecl).unwrap();
        assert!(m.flags.contains(FactFlags::ABSTRACT));
        assert!(!m.flags.contains(FactFlags::RETURNS_VALUE));
    }

    #[test]
    fn receiver_types_follow_declarations_and_chains() {
        let src = "class A { void m(java.util.List<String> xs) { xs.stream().map(x -> x).count(); } }";
        let s = parse_source(src).unwrap();
        let calls: Vec<_> = s
            .iter()
            .enumerate()
            .filter(|(_, f)| f.kind == NodeKind::MethodInvocation)
            .collect();
        assert_eq!(calls.len(), 3);
        let stream = calls.iter().find(|(_, f)| f.payload.as_deref() == Some("stream")).unwrap();
        assert_eq!(stream.1.receiver, Some(Receiver::Type("java.util.List".into())));
        let map = calls.iter().find(|(_, f)| f.payload.as_deref() == Some("map")).unwrap();
        assert_eq!(map.1.receiver, Some(Receiver::Invocation(stream.0)));
    }

    #[test]
    fn static_field_receiver() {
        let s = parse_source("class A { void m(){ System.out.println(1); } }").unwrap();
        let call = s.iter().find(|f| f.kind == NodeKind::MethodInvocation).unwrap();
        assert_eq!(
            call.receiver,
            Some(Receiver::StaticField {
                owner: "System".into(),
                field: "out".into()
            })
        );
    }

    #[test]
    fn condition_parentheses_are_not_expressions() {
        let k = kinds("class A { void m(int x){ if (x > 1) {} while ((x)) {} } }");
        assert_eq!(k.iter().filter(|k| **k == NodeKind::ParenthesizedExpr).count(), 1);
    }

    #[test]
    fn derived_patterns() {
        let src = "public final class P { private final int x; public P(int x){ this.x = x; } public int getX(){ return x; } }";
        let k = kinds(src);
        assert!(k.contains(&NodeKind::ImmutableClass));
        assert!(k.contains(&NodeKind::AccessorMethod));
        let src = "class S { private static S inst = new S(); private S(){} static S get(){ return inst; } }";
        assert!(kinds(src).contains(&NodeKind::SingletonClass));
        let src = "class O { void f(){} void f(int a){} O(){} O(int a){ this(); } }";
        let k = kinds(src);
        assert_eq!(k.iter().filter(|k| **k == NodeKind::OverloadedMethod).count(), 2);
        assert_eq!(k.iter().filter(|k| **k == NodeKind::OverloadedConstructor).count(), 2);
        assert!(k.contains(&NodeKind::ThisConstructorCall));
    }

    #[test]
    fn type_parameters_are_not_type_refs() {
        let s = parse_source("class Box<T> { T value; <U> U id(U u) { return u; } }").unwrap();
        assert!(!s.iter().any(|f| f.kind.is_type_ref()));
    }

    #[test]
    fn deterministic() {
        let src = "import java.util.*; class A { Map<String, List<Integer>> m = new HashMap<>(); }";
        assert_eq!(parse_source(src).unwrap(), parse_source(src).unwrap());
    }
}
