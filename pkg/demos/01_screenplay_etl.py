#!/usr/bin/env python3
"""Walk through the screenplay-corpus ETL on a small inline fixture.

The word-level corpus (one row per spoken word with timing and mention
flags) is aggregated to sentences, the scene-level corpus is expanded to
sentence rows, both sides are merged positionally, and role-based aspect
augmentation is applied.
"""

from shotmem import corpus

WORDS = """\
caseID	sentID	speaker	word	start	end	killer_gold	suspect_gold	other_gold
1	6	Grissom	where's	00:36.5	00:41.5	0	0	0
1	6	Grissom	the	00:36.5	00:41.5	0	0	0
1	6	Grissom	girl?	00:36.5	00:41.5	0	0	1
1	7	Officer	she's	00:41.5	00:46.6	0	0	1
1	7	Officer	down	00:41.5	00:46.6	0	0	0
1	7	Officer	this	00:41.5	00:46.6	0	0	0
1	7	Officer	hall	00:41.5	00:46.6	0	0	0
1	8	None	Grissom	00:46.6	00:51.7	0	0	0
1	8	None	turns	00:46.6	00:51.7	0	0	0
1	8	None	the	00:46.6	00:51.7	0	0	0
1	8	None	corner	00:46.6	00:51.7	0	0	0
"""

SCENES = """\
sceneID	screenplay	aspect
1	where's the girl? | she's down this hall	Victim
2	Grissom turns the corner	Crime scene
"""


def main():
    tokens = corpus.parse_word_corpus(WORDS)
    print(f"parsed {len(tokens)} word tokens")

    sentences = corpus.aggregate_to_sentences(tokens)
    print(f"\naggregated to {len(sentences)} sentences:")
    for s in sentences:
        print(f"  ({s.case_id},{s.sent_id}) {s.speaker or 'None':8s} "
              f"[{s.start_ms}-{s.end_ms}] {s.type_mentioned.value:6s} {s.text!r}")

    scenes = corpus.parse_scene_corpus(SCENES)
    membership = corpus.disaggregate_scenes(scenes)
    print(f"\n{len(scenes)} scenes disaggregated to {len(membership)} sentence rows")

    ann = corpus.merge_corpora(
        sentences,
        membership,
        episode_id="s01e08",
        cast_roles={"Officer": corpus.CastRole.SUSPECT},
    )
    ann = corpus.augment_aspects(ann)
    print("\nmerged + augmented (the Officer is a suspect, so scene 1 gains Suspect):")
    for s in ann.sentences:
        aspects = corpus.format_aspect_set(s.aspects)
        print(f"  scene {ann.scene_index[s.key]}: {s.text!r} -> {aspects}")


if __name__ == "__main__":
    main()
