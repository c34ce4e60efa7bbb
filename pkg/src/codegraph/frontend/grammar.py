"""Node-kind table for the Java subset.

One kind per grammar production.  Leaf kinds carry a source token; every
other kind is structural and is represented in the vocabulary by its name.

    CompilationUnit     := (ClassDeclaration | MethodDeclaration)+
    ClassDeclaration    := Modifier* 'class' Identifier '{' member* '}'
    member              := FieldDeclaration | MethodDeclaration
    FieldDeclaration    := Modifier* type VariableDeclarator (',' VariableDeclarator)* ';'
    MethodDeclaration   := Modifier* type Identifier FormalParameters Block
    FormalParameters    := '(' [FormalParameter (',' FormalParameter)*] ')'
    FormalParameter     := Modifier* type Identifier
    type                := (BasicType | ReferenceType) ('[' ']')*      -- ArrayType per pair
    ReferenceType       := TypeName ('.' TypeName)*
    Block               := '{' statement* '}'
    statement           := Block | EmptyStatement | IfStatement | WhileStatement
                         | ForStatement | ReturnStatement | BreakStatement
                         | ContinueStatement | LocalVariableDeclaration
                         | StatementExpression
    IfStatement         := 'if' '(' expr ')' statement ['else' statement]
    WhileStatement      := 'while' '(' expr ')' statement
    ForStatement        := 'for' '(' (ForControl | EnhancedForControl) ')' statement
    ForControl          := ForInit ';' [expr] ';' ForUpdate
    EnhancedForControl  := Modifier* type VariableDeclarator ':' expr
    LocalVariableDeclaration := Modifier* type VariableDeclarator (',' VariableDeclarator)* ';'
    VariableDeclarator  := Identifier [Operator('=') (expr | ArrayInitializer)]
    StatementExpression := expr ';'      -- assignment, ++/--, call or creation only
    expr                := Assignment | TernaryExpression | BinaryOperation
                         | UnaryOperation | PostfixOperation | Cast | MethodInvocation
                         | FieldAccess | ArrayAccess | ObjectCreation | ArrayCreation
                         | Name | Literal | This
    MethodInvocation    := [expr '.'] Identifier Arguments
    Arguments           := '(' [expr (',' expr)*] ')'
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class NodeKind:
    id: int
    name: str
    is_leaf_kind: bool


_NON_LEAF = (
    "CompilationUnit",
    "ClassDeclaration",
    "FieldDeclaration",
    "MethodDeclaration",
    "FormalParameters",
    "FormalParameter",
    "ReferenceType",
    "ArrayType",
    "Block",
    "EmptyStatement",
    "LocalVariableDeclaration",
    "VariableDeclarator",
    "ArrayInitializer",
    "StatementExpression",
    "IfStatement",
    "WhileStatement",
    "ForStatement",
    "ForControl",
    "ForInit",
    "ForUpdate",
    "EnhancedForControl",
    "ReturnStatement",
    "BreakStatement",
    "ContinueStatement",
    "Assignment",
    "TernaryExpression",
    "BinaryOperation",
    "UnaryOperation",
    "PostfixOperation",
    "Cast",
    "MethodInvocation",
    "Arguments",
    "FieldAccess",
    "ArrayAccess",
    "ObjectCreation",
    "ArrayCreation",
)

_LEAF = (
    "Modifier",
    "BasicType",
    "TypeName",
    "Identifier",
    "Name",
    "Literal",
    "Operator",
    "This",
)

KINDS = tuple(
    NodeKind(i, name, leaf)
    for i, (name, leaf) in enumerate(
        [(n, False) for n in _NON_LEAF] + [(n, True) for n in _LEAF]
    )
)
KIND_BY_NAME = {k.name: k for k in KINDS}
NON_LEAF_KINDS = tuple(k for k in KINDS if not k.is_leaf_kind)
LEAF_KINDS = tuple(k for k in KINDS if k.is_leaf_kind)

STATEMENT_KINDS = frozenset(
    {
        "Block",
        "EmptyStatement",
        "LocalVariableDeclaration",
        "StatementExpression",
        "IfStatement",
        "WhileStatement",
        "ForStatement",
        "ReturnStatement",
        "BreakStatement",
        "ContinueStatement",
    }
)


def kind(name):
    return KIND_BY_NAME[name]
