#include "kahler/check_report.hpp"

#include <cmath>
#include <utility>

namespace kahler {

CheckItem make_check(std::string name, std::string anchor, double lhs, double rhs, double tol, Relation rel)
{
  CheckItem c{std::move(name), std::move(anchor), lhs, rhs, tol, 0, false, {}, rel, true};
  switch (rel) {
    case Relation::equal: c.margin = tol - std::abs(lhs - rhs); break;
    case Relation::less_equal: c.margin = rhs + tol - lhs; break;
    case Relation::greater_equal: c.margin = lhs + tol - rhs; break;
  }
  c.pass = std::isfinite(c.margin) && c.margin >= 0;
  return c;
}

CheckItem skipped_check(std::string name, std::string anchor, std::string reason)
{
  CheckItem c{std::move(name), std::move(anchor), NAN, NAN, 0, NAN, false, std::move(reason), Relation::equal, false};
  return c;
}

CheckItem with_tolerance(CheckItem item, double tol)
{
  if (!item.evaluated) return item;
  CheckItem c = make_check(item.name, item.anchor, item.lhs, item.rhs, tol, item.relation);
  c.note = std::move(item.note);
  return c;
}

CheckItem& CheckReport::add(CheckItem item)
{
  items.push_back(std::move(item));
  return items.back();
}

CheckItem& CheckReport::add(std::string name, std::string anchor, double lhs, double rhs, double tol, Relation rel)
{
  return add(make_check(std::move(name), std::move(anchor), lhs, rhs, tol, rel));
}

void CheckReport::append(const CheckReport& other, const std::string& prefix)
{
  for (CheckItem item : other.items) {
    item.name = prefix + item.name;
    items.push_back(std::move(item));
  }
}

bool CheckReport::aggregate() const
{
  for (const auto& c : items)
    if (!c.pass) return false;
  return true;
}

const CheckItem* CheckReport::find(const std::string& name) const
{
  for (const auto& c : items)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace kahler
