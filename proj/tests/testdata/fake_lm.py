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

"""Scripted masked-LM predictor speaking the JSON-lines protocol.

Proposes "slot<i>", "beta", "gamma" for a masked position i, or nothing when
the position is not masked. With --bad, answers with unsorted scores.
"""

import json
import sys


def main():
    bad = "--bad" in sys.argv
    for line in sys.stdin:
        request = json.loads(line)
        i = request["masked_index"]
        k = request["k"]
        predictions = []
        if request["tokens"][i] == "<mask>":
            predictions = [["slot%d" % i, 0.9], ["beta", 0.5], ["gamma", 0.25]]
            if bad:
                predictions.reverse()
        sys.stdout.write(json.dumps({"predictions": predictions[:k]}) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
