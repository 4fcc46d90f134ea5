#!/usr/bin/env python3
# Copyright 2026 The attrobust Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Generates the toy drug-review corpus and its synonym table.

Each review carries one sentiment cue word surrounded by filler words. Every
filler word has synonyms that are rare in the corpus, so a plainly trained
model leaves their embeddings close to initialization.
"""

import argparse
import json
import random

DRUGS = {
    "zoloft": ["sertraline", "lexapro"],
    "ibuprofen": ["advil", "motrin"],
    "prozac": ["fluoxetine", "paxil"],
    "tylenol": ["paracetamol", "acetaminophen"],
}
SYMPTOMS = {
    "pain": ["ache", "soreness", "discomfort"],
    "anxiety": ["worry", "nervousness", "unease"],
    "headache": ["migraine", "headaches"],
    "insomnia": ["sleeplessness", "wakefulness"],
}
FILLER = {
    "doctor": ["physician", "gp", "specialist"],
    "weeks": ["days", "months"],
    "medication": ["medicine", "pill", "tablet"],
    "dose": ["dosage", "amount"],
    "morning": ["daytime", "dawn"],
    "night": ["evening", "bedtime"],
    "prescribed": ["recommended", "suggested", "ordered"],
    "started": ["began", "tried", "commenced"],
    "taking": ["using", "trying", "swallowing"],
    "daily": ["everyday", "regularly", "routinely"],
}
POSITIVE = {
    "great": ["terrific", "superb"],
    "effective": ["helpful", "useful"],
    "excellent": ["outstanding", "fantastic"],
    "wonderful": ["marvelous", "splendid"],
}
NEGATIVE = {
    "terrible": ["dreadful", "horrible"],
    "useless": ["worthless", "pointless"],
    "awful": ["horrid", "nasty"],
    "harmful": ["damaging", "hurtful"],
}
TEMPLATES = [
    "my doctor prescribed {drug} for {symptom} and it was {cue}",
    "i started taking {drug} daily for my {symptom} , the result is {cue}",
    "after weeks on this medication my {symptom} response was {cue}",
    "the {drug} dose at night for {symptom} felt {cue} overall",
    "taking {drug} every morning for {symptom} has been {cue}",
    "{drug} for {symptom} , my doctor says the effect is {cue}",
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=300)
    parser.add_argument("--seed", type=int, default=2026)
    parser.add_argument("--corpus", default="data/toy_reviews.jsonl")
    parser.add_argument("--synonyms", default="data/toy_synonyms.tsv")
    parser.add_argument("--rare-rate", type=float, default=0.08)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    table = {}
    for group in (DRUGS, SYMPTOMS, FILLER, POSITIVE, NEGATIVE):
        table.update(group)

    def maybe_rare(word):
        options = table.get(word)
        if options and rng.random() < args.rare_rate:
            return rng.choice(options)
        return word

    with open(args.corpus, "w") as out:
        for i in range(args.samples):
            positive = i % 2 == 0
            cue = rng.choice(sorted(POSITIVE if positive else NEGATIVE))
            text = rng.choice(TEMPLATES).format(
                drug=rng.choice(sorted(DRUGS)),
                symptom=rng.choice(sorted(SYMPTOMS)),
                cue=cue,
            )
            words = [maybe_rare(w) for w in text.split()]
            text = " ".join(words).replace(" ,", ",")
            label = "positive" if positive else "negative"
            out.write(json.dumps({"text": text, "labels": [label]}) + "\n")

    with open(args.synonyms, "w") as out:
        for head in sorted(table):
            out.write(head + "\t" + ",".join(table[head]) + "\n")


if __name__ == "__main__":
    main()
