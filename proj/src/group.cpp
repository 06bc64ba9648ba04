// Copyright 2026 The sofic-extract Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sofic/group.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sofic {

namespace {

constexpr int kMaxSymmetricDegree = 6;

std::int64_t mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::int64_t> parse_int_list(std::string_view body) {
  std::vector<std::int64_t> out;
  body = trim(body);
  if (body.empty()) return out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find(',', start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view tok = trim(body.substr(start, end - start));
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw GroupError("malformed integer '" + std::string(tok) + "'");
    }
    out.push_back(value);
    start = end + 1;
  }
  return out;
}

const char* family_label(Family f) {
  switch (f) {
    case Family::integer_lattice: return "integer lattice";
    case Family::finite_cyclic: return "cyclic";
    case Family::finite_symmetric: return "symmetric";
    case Family::heisenberg: return "Heisenberg";
  }
  return "?";
}

}  // namespace

Group Group::integer_lattice(int rank) {
  if (rank < 1) throw GroupError("lattice rank must be positive");
  return Group(Family::integer_lattice, rank);
}

Group Group::finite_cyclic(std::int64_t order) {
  if (order < 1) throw GroupError("cyclic order must be positive");
  return Group(Family::finite_cyclic, order);
}

Group Group::finite_symmetric(int degree) {
  if (degree < 1 || degree > kMaxSymmetricDegree) {
    throw GroupError("symmetric degree must be in [1, 6]");
  }
  return Group(Family::finite_symmetric, degree);
}

Group Group::heisenberg() { return Group(Family::heisenberg, 3); }

Group Group::from_name(std::string_view raw) {
  std::string name(trim(raw));
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "h" || lower == "h3" || lower == "heisenberg") return heisenberg();
  auto number_after = [&](std::size_t pos) -> std::int64_t {
    std::string_view rest(lower);
    rest.remove_prefix(pos);
    if (!rest.empty() && rest.front() == '^') rest.remove_prefix(1);
    if (rest.empty()) return 1;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) {
      throw GroupError("unrecognised group name '" + name + "'");
    }
    return v;
  };
  if (!lower.empty() && lower[0] == 'z') return integer_lattice(static_cast<int>(number_after(1)));
  if (!lower.empty() && lower[0] == 'c') {
    if (lower.size() == 1) throw GroupError("cyclic group needs an order, e.g. C7");
    return finite_cyclic(number_after(1));
  }
  if (!lower.empty() && lower[0] == 's') {
    if (lower.size() == 1) throw GroupError("symmetric group needs a degree, e.g. S4");
    return finite_symmetric(static_cast<int>(number_after(1)));
  }
  throw GroupError("unrecognised group name '" + name + "'");
}

std::string Group::name() const {
  switch (family_) {
    case Family::integer_lattice: return param_ == 1 ? "Z" : "Z^" + std::to_string(param_);
    case Family::finite_cyclic: return "C" + std::to_string(param_);
    case Family::finite_symmetric: return "S" + std::to_string(param_);
    case Family::heisenberg: return "H3";
  }
  return "?";
}

bool Group::is_finite() const {
  return family_ == Family::finite_cyclic || family_ == Family::finite_symmetric;
}

std::int64_t Group::order() const {
  if (family_ == Family::finite_cyclic) return param_;
  if (family_ == Family::finite_symmetric) {
    std::int64_t f = 1;
    for (std::int64_t i = 2; i <= param_; ++i) f *= i;
    return f;
  }
  throw GroupError(name() + " is infinite");
}

Element Group::identity() const {
  switch (family_) {
    case Family::integer_lattice:
      return {family_, std::vector<std::int64_t>(static_cast<std::size_t>(param_), 0)};
    case Family::finite_cyclic: return {family_, {0}};
    case Family::finite_symmetric: {
      std::vector<std::int64_t> w(static_cast<std::size_t>(param_));
      std::iota(w.begin(), w.end(), 0);
      return {family_, w};
    }
    case Family::heisenberg: return {family_, {0, 0, 0}};
  }
  return {};
}

void Group::validate(const Element& g) const {
  if (g.family != family_) {
    throw GroupError(std::string("element of the ") + family_label(g.family) +
                     " family used in " + name());
  }
  switch (family_) {
    case Family::integer_lattice:
      if (static_cast<std::int64_t>(g.coords.size()) != param_) {
        throw GroupError("lattice element of rank " + std::to_string(g.coords.size()) +
                         " used in " + name());
      }
      return;
    case Family::finite_cyclic:
      if (g.coords.size() != 1 || g.coords[0] < 0 || g.coords[0] >= param_) {
        throw GroupError("residue out of range for " + name());
      }
      return;
    case Family::finite_symmetric: {
      if (static_cast<std::int64_t>(g.coords.size()) != param_) {
        throw GroupError("permutation word of wrong length for " + name());
      }
      std::vector<bool> seen(static_cast<std::size_t>(param_), false);
      for (auto v : g.coords) {
        if (v < 0 || v >= param_ || seen[static_cast<std::size_t>(v)]) {
          throw GroupError("permutation word is not a bijection");
        }
        seen[static_cast<std::size_t>(v)] = true;
      }
      return;
    }
    case Family::heisenberg:
      if (g.coords.size() != 3) throw GroupError("Heisenberg element needs (x,y,z)");
      return;
  }
}

bool Group::contains(const Element& g) const {
  try {
    validate(g);
    return true;
  } catch (const GroupError&) {
    return false;
  }
}

Element Group::multiply(const Element& g, const Element& h) const {
  validate(g);
  validate(h);
  Element out{family_, {}};
  switch (family_) {
    case Family::integer_lattice:
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i) out.coords[i] = g.coords[i] + h.coords[i];
      break;
    case Family::finite_cyclic: out.coords = {mod(g.coords[0] + h.coords[0], param_)}; break;
    case Family::finite_symmetric:
      // (gh)(i) = g(h(i))
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i) {
        out.coords[i] = g.coords[static_cast<std::size_t>(h.coords[i])];
      }
      break;
    case Family::heisenberg:
      // (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y')
      out.coords = {g.coords[0] + h.coords[0], g.coords[1] + h.coords[1],
                    g.coords[2] + h.coords[2] + g.coords[0] * h.coords[1]};
      break;
  }
  return out;
}

Element Group::inverse(const Element& g) const {
  validate(g);
  Element out{family_, {}};
  switch (family_) {
    case Family::integer_lattice:
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i) out.coords[i] = -g.coords[i];
      break;
    case Family::finite_cyclic: out.coords = {mod(-g.coords[0], param_)}; break;
    case Family::finite_symmetric:
      out.coords.resize(g.coords.size());
      for (std::size_t i = 0; i < g.coords.size(); ++i) {
        out.coords[static_cast<std::size_t>(g.coords[i])] = static_cast<std::int64_t>(i);
      }
      break;
    case Family::heisenberg:
      out.coords = {-g.coords[0], -g.coords[1], -g.coords[2] + g.coords[0] * g.coords[1]};
      break;
  }
  return out;
}

std::string Group::format(const Element& g) const {
  validate(g);
  std::ostringstream os;
  auto join = [&](char open, char close) {
    os << open;
    for (std::size_t i = 0; i < g.coords.size(); ++i) {
      if (i) os << ',';
      os << g.coords[i];
    }
    os << close;
  };
  switch (family_) {
    case Family::integer_lattice:
      if (param_ == 1) {
        os << g.coords[0];
      } else {
        join('(', ')');
      }
      break;
    case Family::finite_cyclic: os << g.coords[0]; break;
    case Family::finite_symmetric: join('[', ']'); break;
    case Family::heisenberg: join('(', ')'); break;
  }
  return os.str();
}

Element Group::parse(std::string_view raw) const {
  std::string_view text = trim(raw);
  if (text.empty()) throw GroupError("empty element string");
  std::string_view body = text;
  char open = text.front();
  if (open == '(' || open == '[') {
    char close = open == '(' ? ')' : ']';
    if (text.back() != close) throw GroupError("unbalanced brackets in '" + std::string(text) + "'");
    body = text.substr(1, text.size() - 2);
  }
  std::vector<std::int64_t> coords = parse_int_list(body);
  Element g = family_ == Family::finite_cyclic && coords.size() == 1
                  ? Element{family_, {mod(coords[0], param_)}}
                  : Element{family_, coords};
  validate(g);
  return g;
}

Element Group::make(std::vector<std::int64_t> coords) const {
  Element g{family_, std::move(coords)};
  if (family_ == Family::finite_cyclic && g.coords.size() == 1) g.coords[0] = mod(g.coords[0], param_);
  validate(g);
  return g;
}

ElementSet Group::enumerate() const {
  ElementSet out;
  if (family_ == Family::finite_cyclic) {
    for (std::int64_t r = 0; r < param_; ++r) out.push_back({family_, {r}});
    return out;
  }
  if (family_ == Family::finite_symmetric) {
    Element w = identity();
    do {
      out.push_back(w);
    } while (std::next_permutation(w.coords.begin(), w.coords.end()));
    return out;
  }
  throw GroupError("cannot enumerate infinite group " + name());
}

ElementSet Group::generators() const {
  std::vector<Element> gens;
  switch (family_) {
    case Family::integer_lattice:
      for (std::int64_t i = 0; i < param_; ++i) {
        std::vector<std::int64_t> e(static_cast<std::size_t>(param_), 0);
        e[static_cast<std::size_t>(i)] = 1;
        gens.push_back(make(e));
        e[static_cast<std::size_t>(i)] = -1;
        gens.push_back(make(e));
      }
      break;
    case Family::finite_cyclic:
      if (param_ == 1) {
        gens.push_back(identity());
      } else {
        gens.push_back(make({1}));
        gens.push_back(make({param_ - 1}));
      }
      break;
    case Family::finite_symmetric: {
      if (param_ == 1) {
        gens.push_back(identity());
        break;
      }
      Element swap = identity();
      std::swap(swap.coords[0], swap.coords[1]);
      Element cycle = identity();
      std::rotate(cycle.coords.begin(), cycle.coords.begin() + 1, cycle.coords.end());
      gens.push_back(swap);
      gens.push_back(cycle);
      gens.push_back(inverse(cycle));
      break;
    }
    case Family::heisenberg:
      gens = {make({1, 0, 0}), make({-1, 0, 0}), make({0, 1, 0}), make({0, -1, 0})};
      break;
  }
  return make_set(gens);
}

ElementSet make_set(std::vector<Element> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  return elements;
}

ElementSet products(const Group& group, const ElementSet& lhs, const ElementSet& rhs) {
  std::vector<Element> out;
  out.reserve(lhs.size() * rhs.size());
  for (const auto& a : lhs) {
    for (const auto& b : rhs) out.push_back(group.multiply(a, b));
  }
  return make_set(std::move(out));
}

ElementSet set_union(const ElementSet& lhs, const ElementSet& rhs) {
  ElementSet out;
  std::set_union(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(), std::back_inserter(out));
  return out;
}

bool set_contains(const ElementSet& set, const Element& g) {
  return std::binary_search(set.begin(), set.end(), g);
}

FolnerSet::FolnerSet(const Group& group, std::vector<Element> elements)
    : group_(group), elements_(std::move(elements)) {
  if (elements_.empty()) throw GroupError("Folner set must be nonempty");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    group_.validate(elements_[i]);
    if (!index_.emplace(elements_[i], i).second) {
      throw GroupError("duplicate element " + group_.format(elements_[i]) + " in Folner set");
    }
  }
}

std::size_t FolnerSet::index_of(const Element& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) throw GroupError(group_.format(g) + " is not in the Folner set");
  return it->second;
}

namespace {

void check_budget(const Group& group, long double count, std::int64_t budget) {
  if (count > static_cast<long double>(budget)) {
    std::ostringstream os;
    os << "Folner set for " << group.name() << " would hold " << static_cast<double>(count)
       << " elements, above the budget of " << budget;
    throw GroupError(os.str());
  }
}

// Lexicographic enumeration of a product of integer ranges [lo_i, hi_i].
std::vector<Element> box(Family family, const std::vector<std::int64_t>& lo,
                         const std::vector<std::int64_t>& hi) {
  std::vector<Element> out;
  std::vector<std::int64_t> cur = lo;
  const std::size_t d = lo.size();
  while (true) {
    out.push_back({family, cur});
    std::size_t i = d;
    while (i > 0 && cur[i - 1] == hi[i - 1]) {
      cur[i - 1] = lo[i - 1];
      --i;
    }
    if (i == 0) return out;
    ++cur[i - 1];
  }
}

}  // namespace

FolnerSet folner_set(const Group& group, std::int64_t shape, std::int64_t budget) {
  if (group.is_finite()) return FolnerSet(group, group.enumerate());
  if (shape < 1) throw GroupError("Folner shape parameter must be positive");
  if (group.family() == Family::integer_lattice) {
    const auto d = static_cast<std::size_t>(group.parameter());
    check_budget(group, std::pow(static_cast<long double>(shape), static_cast<long double>(d)), budget);
    return FolnerSet(group, box(group.family(), std::vector<std::int64_t>(d, 0),
                                std::vector<std::int64_t>(d, shape - 1)));
  }
  long double r = shape;
  check_budget(group, r * r * r * r, budget);
  return FolnerSet(group, box(group.family(), {0, 0, 0}, {shape - 1, shape - 1, shape * shape - 1}));
}

FolnerSet centered_box(const Group& group, std::int64_t radius, std::int64_t budget) {
  if (group.is_finite()) return FolnerSet(group, group.enumerate());
  if (radius < 0) throw GroupError("box radius must be nonnegative");
  long double side = 2.0L * radius + 1.0L;
  if (group.family() == Family::integer_lattice) {
    const auto d = static_cast<std::size_t>(group.parameter());
    check_budget(group, std::pow(side, static_cast<long double>(d)), budget);
    return FolnerSet(group, box(group.family(), std::vector<std::int64_t>(d, -radius),
                                std::vector<std::int64_t>(d, radius)));
  }
  long double zside = 2.0L * radius * radius + 1.0L;
  check_budget(group, side * side * zside, budget);
  const std::int64_t z = radius * radius;
  return FolnerSet(group, box(group.family(), {-radius, -radius, -z}, {radius, radius, z}));
}

std::size_t translation_overlap(const FolnerSet& m, const Element& h) {
  const Group& group = m.group();
  std::size_t count = 0;
  for (const auto& g : m.elements()) {
    if (m.contains(group.multiply(h, g))) ++count;
  }
  return count;
}

double invariance_defect(const FolnerSet& m, const Element& h) {
  const std::size_t inside = translation_overlap(m, h);
  return static_cast<double>(m.size() - inside) / static_cast<double>(m.size());
}

double max_invariance_defect(const FolnerSet& m, const ElementSet& test) {
  double worst = 0.0;
  for (const auto& h : test) worst = std::max(worst, invariance_defect(m, h));
  return worst;
}

}  // namespace sofic
