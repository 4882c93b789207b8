#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "affrec/affine.hpp"
#include "affrec/epipolar.hpp"

namespace affrec {

// File-format or input-data problem; maps to exit code 2 in the CLI.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatchRecord {
  SiftCorrespondence corr;
  double quality = 0.0;  // valid when the file carries a quality column
  int label = -1;        // valid when the file carries a label column; -1 = outlier
};

// Whitespace-separated rows of
//   u1 v1 u2 v2 q1 q2 alpha1 alpha2 [quality] [label]
// with '#' comments and blank lines allowed. A 9-column file carries
// qualities, a 10-column file qualities and integer plane labels.
struct MatchFile {
  std::vector<MatchRecord> records;
  bool has_quality = false;
  bool has_labels = false;

  std::vector<SiftCorrespondence> correspondences() const;
  std::vector<PointPair> point_pairs() const;
  std::vector<double> qualities() const;  // empty when not present
};

MatchFile parse_match_text(std::istream& in, bool degrees, const std::string& source_name);
MatchFile parse_match_file(const std::string& path, bool degrees = false);

std::string match_file_to_string(const MatchFile& mf);
void write_match_file(const std::string& path, const MatchFile& mf);

// 9 whitespace-separated decimals, row-major, '#' comments allowed.
FundamentalMatrix parse_f_text(std::istream& in, const std::string& source_name);
FundamentalMatrix read_f_file(const std::string& path);
std::string f_matrix_to_string(const FundamentalMatrix& f);
void write_f_file(const std::string& path, const FundamentalMatrix& f);

}  // namespace affrec
