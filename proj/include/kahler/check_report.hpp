#pragma once

#include <string>
#include <vector>

namespace kahler {

enum class Relation { equal, less_equal, greater_equal };

/// One verified identity or inequality. margin >= 0 exactly when the check passes.
struct CheckItem {
  std::string name;
  std::string anchor;
  double lhs = 0;
  double rhs = 0;
  double tol = 0;
  double margin = 0;
  bool pass = false;
  std::string note;
  Relation relation = Relation::equal;
  bool evaluated = true;
};

CheckItem make_check(std::string name, std::string anchor, double lhs, double rhs, double tol, Relation rel);
/// Re-evaluates margin and pass under a different tolerance.
CheckItem with_tolerance(CheckItem item, double tol);
/// A check that could not be evaluated; always fails, with the reason in `note`.
CheckItem skipped_check(std::string name, std::string anchor, std::string reason);

struct CheckReport {
  std::string scenario;
  std::vector<CheckItem> items;

  CheckItem& add(CheckItem item);
  CheckItem& add(std::string name, std::string anchor, double lhs, double rhs, double tol, Relation rel);
  void append(const CheckReport& other, const std::string& prefix = "");
  bool aggregate() const;
  const CheckItem* find(const std::string& name) const;
};

}  // namespace kahler
