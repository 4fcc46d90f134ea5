// Copyright 2026 The attrobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Persistence of robustness reports and the markdown summary table.
//
// rows.csv columns, in order:
//   regime,method,fold,sample_id,cosine,similarity,r,n,length
// aggregates.csv columns, in order:
//   regime,method,count,cosine_mean,cosine_std,similarity_mean,
//   similarity_std,r_mean,r_std
// Reals are written with 17 significant digits so they parse back exactly.

#ifndef ATTROBUST_REPORT_H_
#define ATTROBUST_REPORT_H_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "attrobust/metrics.h"
#include "attrobust/trainer.h"

namespace attrobust {

void WriteRowsCsv(std::ostream& out, std::span<const RobustnessRow> rows);
std::vector<RobustnessRow> ReadRowsCsv(std::istream& in);
void WriteAggregatesCsv(std::ostream& out,
                        std::span<const AggregateRow> aggregates);

// One JSON object per line: sample id, config hash, substitutions, d_max,
// n, constraint check, ranking and the per-candidate trace.
std::string TranscriptLine(const AttackRecord& record,
                           const std::string& config_hash);

// Training log as CSV:
//   epoch,step,batch_size,attacked,classification_loss,attribution_loss,total
void WriteTrainingLogCsv(std::ostream& out,
                         std::span<const TrainingLogRecord> log);

// "0.46 ± 0.10": mean and population standard deviation, two decimals.
std::string FormatCell(const MeanStd& value);

// Display name of a regime in the table ("vanilla" -> "Van.", ...).
std::string RegimeLabel(const std::string& regime);

struct ReportContext {
  std::string title = "Attribution robustness (mean ± std.)";
  std::string encoder = "tfidf-embedding";
  double distance_floor = 1e-3;
};

// Markdown table: one row per regime (first-seen order), column groups
// cos(A_adv, A), sentence similarity and r(s), each split by the methods
// S, DL, IG, A that occur in the aggregates.
std::string RenderReport(std::span<const AggregateRow> aggregates,
                         const ReportContext& context = {});

// Renders the table of a finished bundle directory from its rows.csv.
// Throws ConfigError when the manifest does not mark the bundle complete.
std::string RenderBundle(const std::string& bundle_dir);

}  // namespace attrobust

#endif  // ATTROBUST_REPORT_H_
