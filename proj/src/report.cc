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


#include "attrobust/report.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "attrobust/errors.h"
#include "json.hpp"

namespace attrobust {

using json = nlohmann::json;

namespace {

std::string Real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string Field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted.push_back('"');
    quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  return fields;
}

constexpr const char* kRowsHeader =
    "regime,method,fold,sample_id,cosine,similarity,r,n,length";

}  // namespace

void WriteRowsCsv(std::ostream& out, std::span<const RobustnessRow> rows) {
  out << kRowsHeader << '\n';
  for (const RobustnessRow& row : rows) {
    out << Field(row.regime) << ',' << Field(row.method) << ',' << row.fold
        << ',' << Field(row.sample_id) << ',' << Real(row.cosine) << ','
        << Real(row.similarity) << ',' << Real(row.r) << ',' << row.n << ','
        << row.length << '\n';
  }
}

std::vector<RobustnessRow> ReadRowsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRowsHeader) {
    throw ParseError("unexpected rows CSV header", 1);
  }
  std::vector<RobustnessRow> rows;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 9) throw ParseError("expected 9 fields", line_number);
    try {
      RobustnessRow row;
      row.regime = f[0];
      row.method = f[1];
      row.fold = std::stoi(f[2]);
      row.sample_id = f[3];
      row.cosine = std::stod(f[4]);
      row.similarity = std::stod(f[5]);
      row.r = std::stod(f[6]);
      row.n = std::stoi(f[7]);
      row.length = std::stoi(f[8]);
      rows.push_back(std::move(row));
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", line_number);
    }
  }
  return rows;
}

void WriteAggregatesCsv(std::ostream& out,
                        std::span<const AggregateRow> aggregates) {
  out << "regime,method,count,cosine_mean,cosine_std,similarity_mean,"
         "similarity_std,r_mean,r_std\n";
  for (const AggregateRow& a : aggregates) {
    out << Field(a.regime) << ',' << Field(a.method) << ',' << a.count << ','
        << Real(a.cosine.mean) << ',' << Real(a.cosine.stddev) << ','
        << Real(a.similarity.mean) << ',' << Real(a.similarity.stddev) << ','
        << Real(a.r.mean) << ',' << Real(a.r.stddev) << '\n';
  }
}

std::string TranscriptLine(const AttackRecord& record,
                           const std::string& config_hash) {
  const AttackResult& result = record.result;
  json substitutions = json::array();
  for (const Substitution& s : result.substitutions) {
    substitutions.push_back({{"position", s.position},
                             {"old", s.old_word},
                             {"new", s.new_word},
                             {"value", s.value_after}});
  }
  json trace = json::array();
  for (const TraceStep& t : result.trace) {
    json step = {{"position", t.position},
                 {"candidate", t.candidate},
                 {"feasible", t.feasible},
                 {"accepted", t.accepted},
                 {"value", t.value}};
    if (!t.note.empty()) step["note"] = t.note;
    trace.push_back(std::move(step));
  }
  json line = {{"regime", record.regime},
               {"method", record.method},
               {"fold", record.fold},
               {"sample_id", record.sample_id},
               {"config_hash", config_hash},
               {"adversarial", result.adversarial.Text()},
               {"substitutions", substitutions},
               {"d_max", result.d_max},
               {"n", result.n},
               {"constraint_held", result.constraint_held},
               {"ranking", result.ranking},
               {"ranking_fallback", result.ranking_fallback},
               {"skipped_positions", result.skipped_positions},
               {"trace", trace}};
  return line.dump();
}

void WriteTrainingLogCsv(std::ostream& out,
                         std::span<const TrainingLogRecord> log) {
  out << "epoch,step,batch_size,attacked,classification_loss,"
         "attribution_loss,total\n";
  for (const TrainingLogRecord& r : log) {
    out << r.epoch << ',' << r.step << ',' << r.batch_size << ','
        << r.attacked << ',' << Real(r.classification_loss) << ','
        << Real(r.attribution_loss) << ',' << Real(r.total) << '\n';
  }
}

std::string FormatCell(const MeanStd& value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f ± %.2f", value.mean,
                value.stddev);
  return buffer;
}

std::string RegimeLabel(const std::string& regime) {
  if (regime == "vanilla") return "Van.";
  if (regime == "adversarial") return "Adv.";
  if (regime == "far") return "FAR";
  return regime;
}

std::string RenderReport(std::span<const AggregateRow> aggregates,
                         const ReportContext& context) {
  static const std::vector<std::string> kMethods = {"S", "DL", "IG", "A"};
  std::vector<std::string> regimes;
  std::map<std::pair<std::string, std::string>, const AggregateRow*> cells;
  std::vector<bool> present(kMethods.size(), false);
  for (const AggregateRow& a : aggregates) {
    if (std::find(regimes.begin(), regimes.end(), a.regime) == regimes.end()) {
      regimes.push_back(a.regime);
    }
    cells[{a.regime, a.method}] = &a;
    for (size_t m = 0; m < kMethods.size(); ++m) {
      if (kMethods[m] == a.method) present[m] = true;
    }
  }
  std::vector<std::string> methods;
  for (size_t m = 0; m < kMethods.size(); ++m) {
    if (present[m]) methods.push_back(kMethods[m]);
  }

  std::ostringstream out;
  char floor[32];
  std::snprintf(floor, sizeof(floor), "%g", context.distance_floor);
  out << "# " << context.title << "\n\n";
  out << "d = 1 - cos(per-word maps); d_s = max(" << floor
      << ", 1 - encoder cosine); encoder: " << context.encoder << "\n\n";
  const std::vector<std::string> groups = {"cos(A_adv,A)", "sim", "r(s)"};
  out << "| Model |";
  for (const std::string& g : groups) {
    for (const std::string& m : methods) out << ' ' << g << ' ' << m << " |";
  }
  out << "\n|---|";
  for (size_t i = 0; i < groups.size() * methods.size(); ++i) out << "---|";
  out << '\n';
  for (const std::string& regime : regimes) {
    out << "| " << RegimeLabel(regime) << " |";
    for (size_t g = 0; g < groups.size(); ++g) {
      for (const std::string& m : methods) {
        auto it = cells.find({regime, m});
        if (it == cells.end()) {
          out << " - |";
          continue;
        }
        const AggregateRow& a = *it->second;
        const MeanStd& value = g == 0 ? a.cosine : g == 1 ? a.similarity : a.r;
        out << ' ' << FormatCell(value) << " |";
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string RenderBundle(const std::string& bundle_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(bundle_dir);
  std::ifstream manifest_in(dir / "manifest.json");
  if (!manifest_in) throw ConfigError("bundle has no manifest: " + bundle_dir);
  json manifest;
  try {
    manifest = json::parse(manifest_in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what(), 0);
  }
  if (manifest.value("status", "") != "complete") {
    throw ConfigError("bundle is incomplete: " + bundle_dir);
  }
  std::ifstream rows_in(dir / "rows.csv");
  if (!rows_in) throw ConfigError("bundle has no rows.csv: " + bundle_dir);
  const std::vector<RobustnessRow> rows = ReadRowsCsv(rows_in);
  ReportContext context;
  context.encoder = manifest.value("encoder", context.encoder);
  context.distance_floor = manifest.value("distance_floor", context.distance_floor);
  return RenderReport(Aggregate(rows), context);
}

}  // namespace attrobust
