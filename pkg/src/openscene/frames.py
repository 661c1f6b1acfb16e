"""Verb-frame lexicon: each verb maps to ordered semantic roles and a caption
template whose slots are filled with noun display strings.

Lexicon file format (UTF-8, one record per line):

    verb<TAB>role1,role2,...<TAB>template

Template slots are written ``{RoleName}``.  A literal ``a`` or ``an``
immediately before a slot is an adaptive indefinite article and is re-chosen
at render time from the noun's leading letter.  ``~{RoleName}`` marks a slot
whose trailing prepositional group (the connective text before it plus the
slot itself) is dropped when the noun is blank.  The noun table is a second
file of ``noun_id<TAB>display`` lines.

A loaded lexicon is immutable and all operations here are pure, so it is safe
to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import NotFoundError, ParseError, SchemaError

if TYPE_CHECKING:  # only for annotations; situations live in the pipeline module
    from .pipeline import GroundedSituation

MAX_ROLES = 6

_SLOT_RE = re.compile(r"~?\{([A-Za-z][A-Za-z0-9_-]*)\}")
_ADAPTIVE_ARTICLE_RE = re.compile(r"(?:(?<=\s)|^)([Aa]n?) $")
_FIXED_ARTICLE_RE = re.compile(r"(?:(?<=\s)|^)([Tt]he) $")
_VOWELS = "aeiou"


@dataclass(frozen=True)
class Role:
    """One semantic slot of a frame (e.g. Agent, Item, Place)."""

    name: str

    def __post_init__(self):
        if not self.name:
            raise SchemaError("role name must be non-empty")


@dataclass(frozen=True)
class TemplateSlot:
    """A parsed template slot: which role it renders and how its article behaves.

    article_mode is one of "adaptive-indefinite" (a/an re-chosen per noun),
    "fixed-text" (a literal article such as "the" stays in the surrounding
    text), or "none".
    """

    role: str
    adaptive_article: bool
    droppable: bool
    fixed_article: bool = False

    @property
    def article_mode(self) -> str:
        if self.adaptive_article:
            return "adaptive-indefinite"
        if self.fixed_article:
            return "fixed-text"
        return "none"


@dataclass(frozen=True)
class VerbFrame:
    """A verb with its ordered roles and parsed caption template."""

    verb: str
    roles: tuple[Role, ...]
    template: str
    # Alternating literal text and TemplateSlot, starting and ending with text.
    parts: tuple = field(repr=False)

    @property
    def role_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.roles)


@dataclass(frozen=True)
class FrameLexicon:
    """Immutable verb -> frame map plus the noun-class display table."""

    frames: Mapping[str, VerbFrame]
    noun_display: Mapping[str, str]

    @property
    def verbs(self) -> tuple[str, ...]:
        return tuple(self.frames)

    def frame(self, verb: str) -> VerbFrame:
        try:
            return self.frames[verb]
        except KeyError:
            raise NotFoundError(f"unknown verb {verb!r}") from None

    def display(self, noun_id: str) -> str:
        """Display string for a noun class; unmapped ids pass through verbatim."""
        return self.noun_display.get(noun_id, noun_id)


def _parse_template(verb: str, template: str, roles: tuple[Role, ...], line_no: int | None = None):
    """Split a template into literal text and slots; every role exactly once."""
    where = f" (line {line_no})" if line_no is not None else ""
    role_names = {r.name for r in roles}
    parts: list = []
    seen: list[str] = []
    pos = 0
    literal = ""
    for m in _SLOT_RE.finditer(template):
        literal += template[pos : m.start()]
        role = m.group(1)
        if role not in role_names:
            raise SchemaError(
                f"verb {verb!r}: template slot {{{role}}} names no declared role{where}"
            )
        if role in seen:
            raise SchemaError(f"verb {verb!r}: role {role} appears in two template slots{where}")
        seen.append(role)
        droppable = template[m.start()] == "~"
        adaptive = fixed = False
        art = _ADAPTIVE_ARTICLE_RE.search(literal)
        if art:
            adaptive = True
            literal = literal[: art.start(1)]  # article re-rendered with the noun
        elif _FIXED_ARTICLE_RE.search(literal):
            fixed = True
        parts.append(literal)
        parts.append(TemplateSlot(role, adaptive, droppable, fixed))
        literal = ""
        pos = m.end()
    parts.append(literal + template[pos:])
    missing = [r.name for r in roles if r.name not in seen]
    if missing:
        raise SchemaError(f"verb {verb!r}: template omits role(s) {', '.join(missing)}{where}")
    return tuple(parts)


def make_frame(verb: str, role_names: Iterable[str], template: str, line_no: int | None = None) -> VerbFrame:
    """Build a frame, enforcing the role-count and template invariants."""
    where = f" (line {line_no})" if line_no is not None else ""
    if not verb:
        raise SchemaError(f"verb must be non-empty{where}")
    roles = tuple(Role(n) for n in role_names)
    if not 1 <= len(roles) <= MAX_ROLES:
        raise SchemaError(f"verb {verb!r}: needs 1..{MAX_ROLES} roles, got {len(roles)}{where}")
    if len({r.name for r in roles}) != len(roles):
        raise SchemaError(f"verb {verb!r}: duplicate role names{where}")
    parts = _parse_template(verb, template, roles, line_no)
    return VerbFrame(verb=verb, roles=roles, template=template, parts=parts)


def load_noun_table(source: Iterable[str]) -> dict[str, str]:
    """Parse ``noun_id<TAB>display`` lines into the display table."""
    table: dict[str, str] = {}
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0]:
            raise ParseError(f"noun table line {line_no}: expected 'id<TAB>display', got {line!r}")
        table[cols[0]] = cols[1]
    return table


def load_lexicon(source: Iterable[str], nouns: Iterable[str] | None = None) -> FrameLexicon:
    """Parse the lexicon stream (and optional noun table) into a FrameLexicon.

    Raises ParseError with the line number for malformed records and
    SchemaError for duplicate verbs or template/role mismatches.
    """
    frames: dict[str, VerbFrame] = {}
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise ParseError(
                f"line {line_no}: expected 'verb<TAB>roles<TAB>template', got {len(cols)} field(s)"
            )
        verb, roles_field, template = cols
        role_names = [r.strip() for r in roles_field.split(",")]
        if any(not r for r in role_names):
            raise ParseError(f"line {line_no}: empty role name in {roles_field!r}")
        if verb in frames:
            raise SchemaError(f"line {line_no}: duplicate verb {verb!r}")
        frames[verb] = make_frame(verb, role_names, template, line_no)
    noun_display = load_noun_table(nouns) if nouns is not None else {}
    return FrameLexicon(frames=frames, noun_display=noun_display)


def roles_of(lexicon: FrameLexicon, verb: str) -> list[Role]:
    """The verb's roles in template order."""
    return list(lexicon.frame(verb).roles)


def _indefinite_article(display: str) -> str:
    return "an" if display[:1].lower() in _VOWELS else "a"


def render_caption(lexicon: FrameLexicon, verb: str, nouns: Mapping[str, str]) -> str:
    """Fill the verb's template with noun display strings.

    Blank nouns either drop their trailing prepositional group (droppable
    slots) or render as the lowercase role name.  Adaptive articles are
    re-chosen from the display string, and the sentence is capitalized.
    Deterministic: identical inputs yield byte-identical captions.
    """
    frame = lexicon.frame(verb)
    extra = set(nouns) - set(frame.role_names)
    if extra:
        raise SchemaError(f"verb {verb!r}: nouns for roles not in frame: {sorted(extra)}")

    rendered: list[str] = []
    for part in frame.parts:
        if isinstance(part, str):
            rendered.append(part)
            continue
        noun_id = nouns.get(part.role, "")
        if not noun_id:
            if part.droppable:
                # Drop the connective text before the slot along with the slot.
                if rendered:
                    rendered[-1] = ""
                rendered.append("")
                continue
            display = part.role.lower()
        else:
            display = lexicon.display(noun_id)
        article = f"{_indefinite_article(display)} " if part.adaptive_article else ""
        rendered.append(article + display)

    caption = "".join(rendered)
    return caption[:1].upper() + caption[1:]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking a situation against the lexicon; violations are data."""

    ok: bool
    violations: tuple[str, ...]


def validate_situation(lexicon: FrameLexicon, situation: "GroundedSituation") -> ValidationReport:
    """Report unknown verbs and role-set mismatches without raising or mutating."""
    violations: list[str] = []
    roles = [e.role for e in situation.entries]
    if len(roles) > MAX_ROLES:
        violations.append(f"role count exceeds {MAX_ROLES}: {len(roles)}")
    dupes = {r for r in roles if roles.count(r) > 1}
    if dupes:
        violations.append(f"duplicate roles: {sorted(dupes)}")
    if situation.verb not in lexicon.frames:
        violations.append(f"unknown verb: {situation.verb!r}")
    else:
        frame_roles = set(lexicon.frames[situation.verb].role_names)
        for r in roles:
            if r not in frame_roles:
                violations.append(f"role not in frame: {r!r}")
        for r in frame_roles:
            if r not in roles:
                violations.append(f"missing role: {r!r}")
    return ValidationReport(ok=not violations, violations=tuple(violations))
