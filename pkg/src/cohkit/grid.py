"""Entity grid: sentences x entities matrix of syntactic roles.

Rows are sentences in document order; columns are entities in order of
first occurrence. A cell holds the role the entity plays in that
sentence, with Subject winning over Object when both occur.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .documents import AnnotatedDocument, Role


@dataclass(frozen=True)
class EntityGrid:
    doc_id: str
    sentence_count: int
    columns: tuple[str, ...]  # first-occurrence order, no duplicates
    cells: Mapping[tuple[int, str], Role]

    def role_of(self, sentence_index: int, entity_id: str) -> Role | None:
        return self.cells.get((sentence_index, entity_id))

    def row_entities(self, sentence_index: int) -> list[str]:
        """Entities present in one row, read left-to-right in column order."""
        return [e for e in self.columns if (sentence_index, e) in self.cells]


def build_grid(doc: AnnotatedDocument) -> EntityGrid:
    """Build the entity grid of a document.

    Column order is first occurrence over sentences, then token order
    within a sentence. When an entity carries both roles in one
    sentence, the cell records Subject.
    """
    columns: list[str] = []
    seen: set[str] = set()
    cells: dict[tuple[int, str], Role] = {}
    for sentence in doc.sentences:
        for mention in sentence.mentions:
            entity = mention.entity_id
            if entity not in seen:
                seen.add(entity)
                columns.append(entity)
            key = (sentence.index, entity)
            current = cells.get(key)
            if current is None or (current is Role.OBJECT and mention.role is Role.SUBJECT):
                cells[key] = mention.role
    return EntityGrid(
        doc_id=doc.doc_id,
        sentence_count=len(doc.sentences),
        columns=tuple(columns),
        cells=cells,
    )


def entity_sequence(grid: EntityGrid) -> list[str]:
    """Concatenate the grid rows top-to-bottom, each read in column order.

    This is the document-wide entity sequence that n-gram models are
    computed over; one item per grid cell.
    """
    sequence: list[str] = []
    for row in range(grid.sentence_count):
        sequence.extend(grid.row_entities(row))
    return sequence


def sentence_entity_sets(grid: EntityGrid) -> list[set[str]]:
    """Per-sentence entity sets, one per grid row."""
    sets: list[set[str]] = [set() for _ in range(grid.sentence_count)]
    for (row, entity) in grid.cells:
        sets[row].add(entity)
    return sets
