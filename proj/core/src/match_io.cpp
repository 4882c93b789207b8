#include "affrec/match_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace affrec {

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, std::size_t line_no, const std::string& source) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw DataError(source + ":" + std::to_string(line_no) + ": not a number: '" + tok + "'");
  }
  if (pos != tok.size()) {
    throw DataError(source + ":" + std::to_string(line_no) + ": trailing junk in '" + tok + "'");
  }
  return v;
}

int parse_int(const std::string& tok, std::size_t line_no, const std::string& source) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &pos);
  } catch (const std::exception&) {
    throw DataError(source + ":" + std::to_string(line_no) + ": not an integer: '" + tok + "'");
  }
  if (pos != tok.size()) {
    throw DataError(source + ":" + std::to_string(line_no) + ": trailing junk in '" + tok + "'");
  }
  return v;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string strip_comment(const std::string& line) {
  const std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

std::vector<SiftCorrespondence> MatchFile::correspondences() const {
  std::vector<SiftCorrespondence> out;
  out.reserve(records.size());
  for (const MatchRecord& r : records) out.push_back(r.corr);
  return out;
}

std::vector<PointPair> MatchFile::point_pairs() const {
  std::vector<PointPair> out;
  out.reserve(records.size());
  for (const MatchRecord& r : records) out.push_back({r.corr.p1(), r.corr.p2()});
  return out;
}

std::vector<double> MatchFile::qualities() const {
  std::vector<double> out;
  if (!has_quality) return out;
  out.reserve(records.size());
  for (const MatchRecord& r : records) out.push_back(r.quality);
  return out;
}

MatchFile parse_match_text(std::istream& in, bool degrees, const std::string& source) {
  MatchFile mf;
  std::string line;
  std::size_t line_no = 0;
  int expected_cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> toks = split_tokens(strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() < 8 || toks.size() > 10) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected 8-10 columns, got " +
                      std::to_string(toks.size()));
    }
    if (expected_cols == -1) {
      expected_cols = static_cast<int>(toks.size());
      mf.has_quality = toks.size() >= 9;
      mf.has_labels = toks.size() == 10;
    } else if (static_cast<int>(toks.size()) != expected_cols) {
      throw DataError(source + ":" + std::to_string(line_no) + ": mixed column counts (" +
                      std::to_string(toks.size()) + " vs " + std::to_string(expected_cols) + ")");
    }

    MatchRecord rec;
    double vals[8];
    for (int i = 0; i < 8; ++i) {
      vals[i] = parse_double(toks[static_cast<std::size_t>(i)], line_no, source);
      if (!std::isfinite(vals[i])) {
        throw DataError(source + ":" + std::to_string(line_no) + ": non-finite value");
      }
    }
    const double to_rad = degrees ? M_PI / 180.0 : 1.0;
    rec.corr.first = {vals[0], vals[1], vals[4], wrap_angle(vals[6] * to_rad)};
    rec.corr.second = {vals[2], vals[3], vals[5], wrap_angle(vals[7] * to_rad)};
    if (!(rec.corr.first.scale > 0.0) || !(rec.corr.second.scale > 0.0)) {
      throw DataError(source + ":" + std::to_string(line_no) + ": scales must be positive");
    }
    if (mf.has_quality) rec.quality = parse_double(toks[8], line_no, source);
    if (mf.has_labels) rec.label = parse_int(toks[9], line_no, source);
    mf.records.push_back(rec);
  }
  return mf;
}

MatchFile parse_match_file(const std::string& path, bool degrees) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open match file: " + path);
  }
  return parse_match_text(in, degrees, path);
}

std::string match_file_to_string(const MatchFile& mf) {
  std::string out;
  for (const MatchRecord& r : mf.records) {
    out += format_full(r.corr.first.u) + " " + format_full(r.corr.first.v) + " " +
           format_full(r.corr.second.u) + " " + format_full(r.corr.second.v) + " " +
           format_full(r.corr.first.scale) + " " + format_full(r.corr.second.scale) + " " +
           format_full(r.corr.first.orientation) + " " + format_full(r.corr.second.orientation);
    if (mf.has_quality) out += " " + format_full(r.quality);
    if (mf.has_labels) out += " " + std::to_string(r.label);
    out += "\n";
  }
  return out;
}

void write_match_file(const std::string& path, const MatchFile& mf) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write match file: " + path);
  }
  out << match_file_to_string(mf);
}

FundamentalMatrix parse_f_text(std::istream& in, const std::string& source) {
  std::vector<double> vals;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (const std::string& tok : split_tokens(strip_comment(line))) {
      vals.push_back(parse_double(tok, line_no, source));
    }
  }
  if (vals.size() != 9) {
    throw DataError(source + ": expected 9 values for a fundamental matrix, got " +
                    std::to_string(vals.size()));
  }
  std::array<double, 9> f;
  std::copy(vals.begin(), vals.end(), f.begin());
  try {
    return FundamentalMatrix::from_row_major(f);
  } catch (const std::exception& e) {
    throw DataError(source + ": " + e.what());
  }
}

FundamentalMatrix read_f_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open F-matrix file: " + path);
  }
  return parse_f_text(in, path);
}

std::string f_matrix_to_string(const FundamentalMatrix& f) {
  std::string out;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out += format_full(f(r, c));
      out += c == 2 ? "\n" : " ";
    }
  }
  return out;
}

void write_f_file(const std::string& path, const FundamentalMatrix& f) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write F-matrix file: " + path);
  }
  out << f_matrix_to_string(f);
}

}  // namespace affrec
