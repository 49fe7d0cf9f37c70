// Copyright 2026 The PolicyScope Authors
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

#include "policyscope/codebook.h"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"
#include "policyscope/error.h"

namespace policyscope {
namespace embedded {
extern const std::string_view kCodebookJson;
}  // namespace embedded

namespace codebook {

using nlohmann::json;

Codebook Codebook::load(std::string_view json_bytes) {
  json doc;
  try {
    doc = json::parse(json_bytes);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("codebook is not valid JSON: ") + e.what());
  }
  Codebook book;
  try {
    for (const auto& entry : doc.at("categories")) {
      PolicyCategory category;
      category.id = entry.at("id").get<std::string>();
      category.display_name = entry.at("name").get<std::string>();
      category.description = entry.value("description", "");
      if (entry.contains("cap_code") && !entry.at("cap_code").is_null()) {
        category.cap_major_code = entry.at("cap_code").get<int>();
      }
      book.categories_.push_back(std::move(category));
    }
    if (doc.contains("groups")) {
      for (const auto& entry : doc.at("groups")) {
        CategoryGroup group;
        group.group_id = entry.at("id").get<std::string>();
        group.display_name = entry.value("name", group.group_id);
        group.members = entry.at("members").get<std::vector<std::string>>();
        book.groups_.push_back(std::move(group));
      }
    }
    if (doc.contains("subsets")) {
      for (const auto& [name, members] : doc.at("subsets").items()) {
        book.subsets_[name] = members.get<std::vector<std::string>>();
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed codebook: ") + e.what());
  }
  book.validate();
  for (const auto& group : book.groups_) {
    for (const auto& member : group.members) book.group_by_member_[member] = group.group_id;
  }
  return book;
}

const Codebook& Codebook::bundled() {
  static const Codebook book = load(embedded::kCodebookJson);
  return book;
}

void Codebook::validate() const {
  std::unordered_set<std::string_view> ids;
  for (const auto& category : categories_) {
    if (category.id.empty()) throw ValidationError("category with empty id");
    if (category.display_name.empty()) {
      throw ValidationError("category '" + category.id + "' has an empty name");
    }
    if (!ids.insert(category.id).second) {
      throw ValidationError("duplicate category id '" + category.id + "'");
    }
  }
  if (!ids.contains(kOtherId)) throw ValidationError("codebook lacks the 'other' category");

  std::unordered_set<std::string_view> grouped;
  for (const auto& group : groups_) {
    if (ids.contains(group.group_id)) {
      throw ValidationError("group id '" + group.group_id + "' collides with a category id");
    }
    std::unordered_set<std::string_view> members;
    for (const auto& member : group.members) {
      if (!ids.contains(member)) {
        throw ValidationError("group '" + group.group_id + "' has unknown member '" + member + "'");
      }
      if (!members.insert(member).second) {
        throw ValidationError("group '" + group.group_id + "' repeats '" + member + "'");
      }
      if (!grouped.insert(member).second) {
        throw ValidationError("category '" + member + "' belongs to more than one group");
      }
    }
  }
  for (const auto& [name, members] : subsets_) {
    std::unordered_set<std::string_view> seen;
    for (const auto& member : members) {
      const bool is_group = std::any_of(groups_.begin(), groups_.end(),
                                        [&](const auto& g) { return g.group_id == member; });
      if (!ids.contains(member) && !is_group) {
        throw ValidationError("subset '" + name + "' has unknown member '" + member + "'");
      }
      if (!seen.insert(member).second) {
        throw ValidationError("subset '" + name + "' repeats '" + member + "'");
      }
    }
  }
}

std::vector<std::string> Codebook::category_ids() const {
  std::vector<std::string> out;
  out.reserve(categories_.size());
  for (const auto& category : categories_) out.push_back(category.id);
  return out;
}

bool Codebook::has_category(std::string_view id) const {
  return std::any_of(categories_.begin(), categories_.end(),
                     [&](const auto& c) { return c.id == id; });
}

bool Codebook::has_group(std::string_view id) const {
  return std::any_of(groups_.begin(), groups_.end(),
                     [&](const auto& g) { return g.group_id == id; });
}

bool Codebook::resolves(std::string_view id) const { return has_category(id) || has_group(id); }

std::optional<std::string> Codebook::group_of(std::string_view category_id) const {
  const auto it = group_by_member_.find(category_id);
  if (it == group_by_member_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& Codebook::subset(std::string_view name) const {
  const auto it = subsets_.find(std::string(name));
  if (it == subsets_.end()) throw ValidationError("unknown subset '" + std::string(name) + "'");
  return it->second;
}

std::string Codebook::display_name(std::string_view id) const {
  for (const auto& c : categories_) {
    if (c.id == id) return c.display_name;
  }
  for (const auto& g : groups_) {
    if (g.group_id == id) return g.display_name;
  }
  return std::string(id);
}

std::set<std::string> apply_grouping(const std::set<std::string>& labels,
                                     const Codebook& codebook) {
  std::set<std::string> out;
  for (const auto& label : labels) {
    if (!codebook.resolves(label)) {
      throw ValidationError("unknown category '" + label + "'");
    }
    out.insert(codebook.group_of(label).value_or(label));
  }
  return out;
}

LabelMatrix group_columns(const LabelMatrix& matrix, const Codebook& codebook) {
  // Column plan: for each output column, the source columns merged into it.
  std::vector<std::string> out_ids;
  std::vector<std::vector<std::size_t>> sources;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    const std::string& id = matrix.category_ids[c];
    if (!codebook.resolves(id)) throw ValidationError("unknown category '" + id + "'");
    const std::string target = codebook.group_of(id).value_or(id);
    const auto it = std::find(out_ids.begin(), out_ids.end(), target);
    if (it == out_ids.end()) {
      out_ids.push_back(target);
      sources.push_back({c});
    } else {
      sources[static_cast<std::size_t>(it - out_ids.begin())].push_back(c);
    }
  }
  LabelMatrix out(matrix.ad_ids, out_ids, matrix.mode);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t k = 0; k < out_ids.size(); ++k) {
      double v = 0.0;
      for (const std::size_t c : sources[k]) v = std::max(v, matrix.at(r, c));
      out.at(r, k) = v;
    }
  }
  return out;
}

LabelMatrix subset_filter(const LabelMatrix& matrix, const std::vector<std::string>& subset) {
  std::vector<std::ptrdiff_t> source;
  source.reserve(subset.size());
  for (const auto& id : subset) source.push_back(matrix.column_index(id));
  LabelMatrix out({}, subset, matrix.mode);
  std::vector<double> values(subset.size());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    bool any = false;
    for (std::size_t k = 0; k < subset.size(); ++k) {
      values[k] = source[k] < 0 ? 0.0 : matrix.at(r, static_cast<std::size_t>(source[k]));
      any = any || values[k] > 0.0;
    }
    if (any) out.append_row(matrix.ad_ids[r], values);
  }
  return out;
}

LabelMatrix subset_filter(const LabelMatrix& matrix, const Codebook& codebook,
                          std::string_view subset_name) {
  return subset_filter(matrix, codebook.subset(subset_name));
}

}  // namespace codebook
}  // namespace policyscope
