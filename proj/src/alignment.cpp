#include "vipr/alignment.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vipr {

Base base_from_char(char c) {
  switch (c) {
    case 'A': case 'a': return kA;
    case 'C': case 'c': return kC;
    case 'G': case 'g': return kG;
    case 'T': case 't': return kT;
    default: return kMissing;
  }
}

char base_to_char(Base b) {
  static constexpr char kChars[] = {'A', 'C', 'G', 'T', 'N'};
  return kChars[b];
}

Alignment::Alignment(std::vector<std::string> taxa, std::vector<std::vector<Base>> rows,
                     bool compress)
    : taxa_(std::move(taxa)), rows_(std::move(rows)), compressed_(compress) {
  if (taxa_.size() < 2) throw AlignmentError("alignment needs at least two taxa");
  if (rows_.size() != taxa_.size())
    throw AlignmentError("number of rows does not match number of taxa");
  std::set<std::string> seen;
  for (const auto& name : taxa_) {
    if (name.empty()) throw AlignmentError("empty taxon name");
    if (!seen.insert(name).second) throw AlignmentError("duplicate taxon name '" + name + "'");
  }
  n_sites_ = rows_.front().size();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].size() != n_sites_)
      throw AlignmentError("sequence for taxon '" + taxa_[i] + "' has length " +
                           std::to_string(rows_[i].size()) + ", expected " +
                           std::to_string(n_sites_));
    for (Base b : rows_[i])
      if (b > kMissing) throw AlignmentError("invalid character code for taxon '" + taxa_[i] + "'");
  }

  const std::size_t n = taxa_.size();
  std::map<std::vector<Base>, std::size_t> ids;
  std::vector<std::vector<Base>> columns;
  pattern_index_.resize(n_sites_);
  std::vector<Base> column(n);
  for (std::size_t m = 0; m < n_sites_; ++m) {
    for (std::size_t i = 0; i < n; ++i) column[i] = rows_[i][m];
    std::size_t id = columns.size();
    if (compressed_) {
      auto [it, inserted] = ids.try_emplace(column, columns.size());
      id = it->second;
      if (inserted) {
        columns.push_back(column);
        weights_.push_back(0.0);
      }
    } else {
      columns.push_back(column);
      weights_.push_back(0.0);
    }
    weights_[id] += 1.0;
    pattern_index_[m] = id;
  }
  const std::size_t np = columns.size();
  patterns_.resize(n * np);
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t i = 0; i < n; ++i) patterns_[i * np + p] = columns[p][i];
}

std::size_t Alignment::taxon_index(std::string_view name) const {
  for (std::size_t i = 0; i < taxa_.size(); ++i)
    if (taxa_[i] == name) return i;
  throw AlignmentError("unknown taxon '" + std::string(name) + "'");
}

bool Alignment::operator==(const Alignment& other) const {
  return taxa_ == other.taxa_ && rows_ == other.rows_ && compressed_ == other.compressed_ &&
         patterns_ == other.patterns_ && weights_ == other.weights_ &&
         pattern_index_ == other.pattern_index_;
}

Alignment parse_fasta(std::string_view text, bool compress) {
  std::vector<std::string> names;
  std::vector<std::vector<Base>> rows;
  std::vector<std::size_t> header_lines;
  std::set<std::string> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '>') {
      std::string_view header = line.substr(1);
      const auto first = header.find_first_not_of(" \t");
      header = first == std::string_view::npos ? std::string_view{} : header.substr(first);
      const auto cut = header.find_first_of(" \t");
      std::string name(header.substr(0, cut));
      if (name.empty())
        throw AlignmentError("line " + std::to_string(line_no) + ": empty taxon name");
      if (!seen.insert(name).second)
        throw AlignmentError("line " + std::to_string(line_no) + ": duplicate taxon name '" +
                             name + "'");
      names.push_back(std::move(name));
      rows.emplace_back();
      header_lines.push_back(line_no);
    } else {
      if (names.empty())
        throw AlignmentError("line " + std::to_string(line_no) +
                             ": sequence data before the first '>' header");
      for (char c : line) {
        if (c == ' ' || c == '\t') continue;
        rows.back().push_back(base_from_char(c));
      }
    }
    if (end == text.size()) break;
  }

  if (names.empty()) throw AlignmentError("empty FASTA input");
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (rows[i].empty())
      throw AlignmentError("line " + std::to_string(header_lines[i]) + ": taxon '" + names[i] +
                           "' has an empty sequence");
    if (rows[i].size() != rows[0].size())
      throw AlignmentError("line " + std::to_string(header_lines[i]) + ": taxon '" + names[i] +
                           "' has length " + std::to_string(rows[i].size()) + ", expected " +
                           std::to_string(rows[0].size()) + " (from taxon '" + names[0] + "')");
  }
  if (names.size() < 2) throw AlignmentError("FASTA input has fewer than two taxa");
  return Alignment(std::move(names), std::move(rows), compress);
}

Alignment read_fasta_file(const std::string& path, bool compress) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AlignmentError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_fasta(buf.str(), compress);
}

std::string to_fasta(const Alignment& a, std::size_t line_width) {
  std::string out;
  for (std::size_t i = 0; i < a.n_taxa(); ++i) {
    out += '>';
    out += a.taxa()[i];
    out += '\n';
    const auto& row = a.row(i);
    for (std::size_t m = 0; m < row.size(); ++m) {
      out += base_to_char(row[m]);
      if ((m + 1) % line_width == 0 || m + 1 == row.size()) out += '\n';
    }
  }
  return out;
}

Alignment drop_constant_sites(const Alignment& a, std::string* warning) {
  const std::size_t n = a.n_taxa();
  std::vector<std::vector<Base>> rows(n);
  for (std::size_t m = 0; m < a.n_sites(); ++m) {
    Base first = kMissing;
    bool variable = false;
    for (std::size_t i = 0; i < n && !variable; ++i) {
      const Base b = a.state(i, m);
      if (b == kMissing) continue;
      if (first == kMissing) first = b;
      else if (b != first) variable = true;
    }
    if (!variable) continue;
    for (std::size_t i = 0; i < n; ++i) rows[i].push_back(a.state(i, m));
  }
  if (rows.front().empty() && warning)
    *warning = "all sites are constant; the filtered alignment has no sites";
  return Alignment(a.taxa(), std::move(rows), a.compressed());
}

std::string alignment_summary_json(const Alignment& a) {
  nlohmann::json j;
  j["taxa"] = a.taxa();
  j["n_sites"] = a.n_sites();
  j["n_patterns"] = a.n_patterns();
  return j.dump();
}

}  // namespace vipr
