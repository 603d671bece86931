#include "rodessa/csv.hpp"

#include "rodessa/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rodessa {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::Data, "line " + std::to_string(line_no) + ": cannot parse '" + field + "'");
  }
  return value;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

MultivariateSeries read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw Error(ErrorKind::Data, "missing header row");

  const bool has_time = lower(header.front()) == "time";
  const std::size_t first = has_time ? 1 : 0;
  if (header.size() <= first) throw Error(ErrorKind::Data, "no series columns");
  std::vector<std::string> names(header.begin() + static_cast<std::ptrdiff_t>(first), header.end());

  std::vector<std::string> stamps;
  std::vector<double> flat;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::Data, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(header.size()) + " fields, got " +
                                       std::to_string(fields.size()));
    }
    if (has_time) stamps.push_back(fields.front());
    for (std::size_t c = first; c < fields.size(); ++c) flat.push_back(parse_double(fields[c], line_no));
    ++rows;
  }

  const auto p = static_cast<Eigen::Index>(names.size());
  Matrix values(static_cast<Eigen::Index>(rows), p);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) values(i, j) = flat[static_cast<std::size_t>(i * p + j)];
  }
  return MultivariateSeries(std::move(values), std::move(names), std::move(stamps));
}

MultivariateSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_series_csv(in);
}

void write_matrix_csv(std::ostream& out, const Matrix& values,
                      const std::vector<std::string>& header, const Provenance& provenance,
                      std::size_t first_index) {
  for (const auto& [key, value] : provenance) out << "# " << key << '=' << value << '\n';
  out << "time";
  for (const auto& name : header) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << first_index + static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(i, j));
    out << '\n';
  }
}

void write_series_csv(std::ostream& out, const MultivariateSeries& series,
                      const Provenance& provenance) {
  for (const auto& [key, value] : provenance) out << "# " << key << '=' << value << '\n';
  out << "time";
  for (const auto& name : series.names()) out << ',' << name;
  out << '\n';
  const Matrix& v = series.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    if (series.timestamps().empty()) {
      out << i + 1;
    } else {
      out << series.timestamps()[static_cast<std::size_t>(i)];
    }
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << ',' << format_double(v(i, j));
    out << '\n';
  }
}

}  // namespace rodessa
