"""Synthetic demo corpus: small dialogues where entity cues are decisive.

Each topic is a three-turn conversation over a single-sentence passage, built
so the behavior of every pipeline stage is predictable:

* turn 0 is self-contained and names the entity;
* turn 1 is a pronoun follow-up sharing no token with the passage, so the
  lexical reader fails on the bare question but succeeds once the entity is
  attached (the distant-supervision labeler's target situation);
* turn 2 is another follow-up whose only route to the entity is the stored
  structured representation of turn 1 — its own selected history never
  mentions the entity, which is what makes the question-entity slot matter.

The companion embedding file uses two token clusters with cosine 0.8: each
question is similar enough to its predecessor to pass the 0.75 selection
threshold, while turn 2 scores 0.64 against turn 0 and drops it.

The generator emits real QuAC-format and CANARD-format files, so the demo
exercises the ingestion path end to end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .similarity import tokenize

# Embedding clusters: tokens of turn-0 text map to U, later-turn tokens to V.
_CLUSTER_U = (1.0, 0.0)
_CLUSTER_V = (0.8, 0.6)


@dataclass(frozen=True)
class FixtureTopic:
    title: str
    background: str
    answer: str      # single-token gold answer, first word of the passage
    entity: str      # two-word entity mentioned in turn 0
    distractor: str  # capitalized name in turn 0 that never helps
    passage: str     # one sentence, no trailing sentinel
    q0: str
    q1: str
    q2: str
    rewrite1: str
    rewrite2: str


TOPICS = [
    FixtureTopic(
        title="FRIENDS",
        background="FRIENDS is a beloved sitcom remembered for its quirky ensemble.",
        answer="Cleaning", entity="Monica Geller", distractor="Phoebe",
        passage="Cleaning dominated the daily routine of Monica Geller, according to interviews the producers gave during many seasons.",
        q0="Who was obsessed about neatness, Monica Geller or Phoebe?",
        q1="What was she obsessed about?",
        q2="And what consumed her days?",
        rewrite1="What was Monica Geller obsessed about?",
        rewrite2="What consumed the days of Monica Geller?",
    ),
    FixtureTopic(
        title="Night Shift Radio",
        background="Night Shift Radio chronicled a small station and its devoted host.",
        answer="Jazz", entity="Harold Finch", distractor="Grace",
        passage="Jazz filled the lonely evenings of Harold Finch, a detail producers repeated in every retrospective broadcast since.",
        q0="Who was keen about records, Harold Finch or Grace?",
        q1="What was he keen about?",
        q2="And what held his attention?",
        rewrite1="What was Harold Finch keen about?",
        rewrite2="What held the attention of Harold Finch?",
    ),
    FixtureTopic(
        title="Checkmate Chronicles",
        background="Checkmate Chronicles followed club players through a long championship year.",
        answer="Chess", entity="Elena Vasquez", distractor="Marcus",
        passage="Chess consumed the quiet weekends of Elena Vasquez, friends recalled whenever reporters pressed for telling details.",
        q0="Who was wild about strategy, Elena Vasquez or Marcus?",
        q1="What was she wild about?",
        q2="And what ruled her time?",
        rewrite1="What was Elena Vasquez wild about?",
        rewrite2="What ruled the time of Elena Vasquez?",
    ),
    FixtureTopic(
        title="Paper Worlds",
        background="Paper Worlds profiled artists working in folded sculpture.",
        answer="Origami", entity="Kenji Watanabe", distractor="Lena",
        passage="Origami occupied the spare hours of Kenji Watanabe, colleagues noted while recalling several memorable festival panels.",
        q0="Who was crazy about folding, Kenji Watanabe or Lena?",
        q1="What was he crazy about?",
        q2="And what absorbed his focus?",
        rewrite1="What was Kenji Watanabe crazy about?",
        rewrite2="What absorbed the focus of Kenji Watanabe?",
    ),
    FixtureTopic(
        title="Skyward",
        background="Skyward documented amateur astronomers in a mountain town.",
        answer="Astronomy", entity="Priya Sharma", distractor="Dev",
        passage="Astronomy brightened the late nights of Priya Sharma, neighbors observed while trading stories near a shared porch.",
        q0="Who was curious about stars, Priya Sharma or Dev?",
        q1="What was she curious about?",
        q2="And what lit her imagination?",
        rewrite1="What was Priya Sharma curious about?",
        rewrite2="What lit the imagination of Priya Sharma?",
    ),
    FixtureTopic(
        title="Green Mornings",
        background="Green Mornings visited growers tending remarkable gardens.",
        answer="Gardening", entity="Samuel Okafor", distractor="Amara",
        passage="Gardening anchored the early mornings of Samuel Okafor, relatives mentioned when journalists toured that sprawling compound.",
        q0="Who was mad about roses, Samuel Okafor or Amara?",
        q1="What was he mad about?",
        q2="And what steadied his routine?",
        rewrite1="What was Samuel Okafor mad about?",
        rewrite2="What steadied the routine of Samuel Okafor?",
    ),
    FixtureTopic(
        title="Winter Kitchens",
        background="Winter Kitchens celebrated holiday cooks and their tables.",
        answer="Baking", entity="Ingrid Larsen", distractor="Sofia",
        passage="Baking sweetened the festive gatherings of Ingrid Larsen, guests remembered long after each holiday season ended.",
        q0="Who was fussy about pastry, Ingrid Larsen or Sofia?",
        q1="What was she fussy about?",
        q2="And what filled her winters?",
        rewrite1="What was Ingrid Larsen fussy about?",
        rewrite2="What filled the winters of Ingrid Larsen?",
    ),
    FixtureTopic(
        title="Tidewatchers",
        background="Tidewatchers traced surf culture along a rugged coastline.",
        answer="Surfing", entity="Diego Morales", distractor="Lucas",
        passage="Surfing defined the restless summers of Diego Morales, biographers wrote in chapters covering that whole coastal era.",
        q0="Who was serious about waves, Diego Morales or Lucas?",
        q1="What was he serious about?",
        q2="And what shaped his youth?",
        rewrite1="What was Diego Morales serious about?",
        rewrite2="What shaped the youth of Diego Morales?",
    ),
    FixtureTopic(
        title="Verses on Tour",
        background="Verses on Tour followed a band whose lyricist kept notebooks everywhere.",
        answer="Poetry", entity="Amara Diallo", distractor="Zainab",
        passage="Poetry softened the difficult tours of Amara Diallo, bandmates explained whenever critics questioned those late lyrics.",
        q0="Who was earnest about verses, Amara Diallo or Zainab?",
        q1="What was she earnest about?",
        q2="And what eased her nerves?",
        rewrite1="What was Amara Diallo earnest about?",
        rewrite2="What eased the nerves of Amara Diallo?",
    ),
    FixtureTopic(
        title="Ink and Evening",
        background="Ink and Evening portrayed a calligraphy teacher and his students.",
        answer="Calligraphy", entity="Wei Zhang", distractor="Mei",
        passage="Calligraphy steadied the anxious evenings of Wei Zhang, students noticed during workshops hosted at a nearby academy.",
        q0="Who was precise about strokes, Wei Zhang or Mei?",
        q1="What was he precise about?",
        q2="And what calmed his hands?",
        rewrite1="What was Wei Zhang precise about?",
        rewrite2="What calmed the hands of Wei Zhang?",
    ),
]


def validate_topic(topic: FixtureTopic) -> None:
    """Structural checks behind the reader/selection math of each topic."""
    passage_tokens = tokenize(topic.passage)
    entity_tokens = tokenize(topic.entity)
    if passage_tokens[0] != topic.answer.lower():
        raise ValueError(f"{topic.title}: passage must start with the answer word")
    query_side = set(tokenize(" ".join([topic.q0, topic.q1, topic.q2, topic.entity,
                                        topic.distractor])))
    matched = [i for i, tok in enumerate(passage_tokens) if tok in query_side]
    if not matched or max(matched) > 10:
        raise ValueError(f"{topic.title}: entity cluster must sit within the first 10 tokens")
    if set(matched) != {passage_tokens.index(t) for t in entity_tokens}:
        raise ValueError(f"{topic.title}: only entity tokens may occur in the passage")
    if set(tokenize(topic.q1)) & set(passage_tokens):
        raise ValueError(f"{topic.title}: bare follow-up must share no token with the passage")
    if set(tokenize(topic.q2)) & set(passage_tokens):
        raise ValueError(f"{topic.title}: second follow-up must share no token with the passage")
    if len(set(tokenize(topic.q0)) & set(tokenize(topic.q1))) < 2:
        raise ValueError(f"{topic.title}: turn 1 needs bridge tokens shared with turn 0")
    if topic.entity not in topic.passage or topic.entity not in topic.q0:
        raise ValueError(f"{topic.title}: entity must appear in both passage and first question")


for _topic in TOPICS:
    validate_topic(_topic)


def _qa(qa_id: str, question: str, answer_text: str, start: int) -> dict:
    answer = {"text": answer_text, "answer_start": start}
    return {"id": qa_id, "question": question, "followup": "y", "yesno": "x",
            "orig_answer": answer, "answers": [answer]}


def quac_json(num_dialogues: int = len(TOPICS)) -> dict:
    """QuAC-format data: topics repeat with fresh dialogue ids as needed."""
    articles = []
    for i in range(num_dialogues):
        topic = TOPICS[i % len(TOPICS)]
        did = f"fixture_{i:04d}"
        context = f"{topic.passage} CANNOTANSWER"
        articles.append({
            "title": topic.title,
            "background": topic.background,
            "paragraphs": [{
                "id": did,
                "context": context,
                "qas": [
                    _qa(f"{did}_q0", topic.q0, topic.entity, context.index(topic.entity)),
                    _qa(f"{did}_q1", topic.q1, topic.answer, 0),
                    _qa(f"{did}_q2", topic.q2, topic.answer, 0),
                ],
            }],
        })
    return {"data": articles}


def canard_records(num_dialogues: int = len(TOPICS)) -> list[dict]:
    """CANARD-format rewrites for the two follow-up turns of each dialogue."""
    records = []
    for i in range(num_dialogues):
        topic = TOPICS[i % len(TOPICS)]
        did = f"fixture_{i:04d}"
        records.append({
            "History": [topic.title, topic.q0],
            "Question": topic.q1,
            "Rewrite": topic.rewrite1,
            "QuAC_dialog_id": did,
            "Question_no": 1,
        })
        records.append({
            "History": [topic.title, topic.q0, topic.entity, topic.q1],
            "Question": topic.q2,
            "Rewrite": topic.rewrite2,
            "QuAC_dialog_id": did,
            "Question_no": 2,
        })
    return records


def embedding_lines() -> str:
    """Two-cluster embedding table over every question/answer token.

    Turn-0 vocabulary (cluster U) and later-turn vocabulary (cluster V) have
    cosine 0.8, so squared-cosine term similarity is 0.64: adjacent turns
    clear the 0.75 selection threshold through their bridge tokens while
    turn 2 vs turn 0 stays below it.
    """
    u_tokens: list[str] = []
    v_tokens: list[str] = []
    seen: set[str] = set()
    for topic in TOPICS:
        for tok in tokenize(f"{topic.q0} {topic.entity} {topic.distractor}"):
            if tok not in seen:
                seen.add(tok)
                u_tokens.append(tok)
    for topic in TOPICS:
        for tok in tokenize(f"{topic.q1} {topic.answer} {topic.q2}"):
            if tok not in seen:
                seen.add(tok)
                v_tokens.append(tok)
    lines = [f"{tok} {_CLUSTER_U[0]} {_CLUSTER_U[1]}" for tok in u_tokens]
    lines += [f"{tok} {_CLUSTER_V[0]} {_CLUSTER_V[1]}" for tok in v_tokens]
    return "\n".join(lines) + "\n"


def write_demo_files(out_dir, num_dialogues: int = len(TOPICS)) -> dict:
    """Write quac.json, canard.json, and embeddings.txt; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "quac": out / "quac.json",
        "canard": out / "canard.json",
        "embeddings": out / "embeddings.txt",
    }
    with open(paths["quac"], "w", encoding="utf-8") as fh:
        json.dump(quac_json(num_dialogues), fh, ensure_ascii=False, indent=2)
    with open(paths["canard"], "w", encoding="utf-8") as fh:
        json.dump(canard_records(num_dialogues), fh, ensure_ascii=False, indent=2)
    with open(paths["embeddings"], "w", encoding="utf-8") as fh:
        fh.write(embedding_lines())
    return paths
