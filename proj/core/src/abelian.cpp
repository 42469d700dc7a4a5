#include "clab/abelian.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace clab {

FinAbGroup::FinAbGroup(std::vector<long long> cyclic_orders)
    : orders(std::move(cyclic_orders)) {
  for (long long n : orders)
    if (n < 1) throw ConsistencyError("cyclic order must be >= 1");
}

long long FinAbGroup::size() const {
  __int128 p = 1;
  for (long long n : orders) p *= n;
  return detail::checked_narrow(p, "group size");
}

long long FinAbGroup::exponent() const {
  long long e = 1;
  for (long long n : orders) e = std::lcm(e, n);
  return e;
}

long long FinAbGroup::index_of(const GroupElement& x) const {
  check_element(x, "index_of");
  long long idx = 0;
  for (size_t i = 0; i < orders.size(); ++i) idx = idx * orders[i] + x[i];
  return idx;
}

GroupElement FinAbGroup::element_at(long long index) const {
  GroupElement x(orders.size(), 0);
  for (size_t i = orders.size(); i-- > 0;) {
    x[i] = index % orders[i];
    index /= orders[i];
  }
  return x;
}

GroupElement FinAbGroup::generator(int i) const {
  GroupElement x = zero();
  if (orders[i] > 1) x[i] = 1;
  return x;
}

GroupElement FinAbGroup::add(const GroupElement& a, const GroupElement& b) const {
  GroupElement c(orders.size());
  for (size_t i = 0; i < orders.size(); ++i) c[i] = (a[i] + b[i]) % orders[i];
  return c;
}

GroupElement FinAbGroup::neg(const GroupElement& a) const {
  GroupElement c(orders.size());
  for (size_t i = 0; i < orders.size(); ++i) c[i] = (orders[i] - a[i]) % orders[i];
  return c;
}

GroupElement FinAbGroup::sub(const GroupElement& a, const GroupElement& b) const {
  return add(a, neg(b));
}

GroupElement FinAbGroup::scale(long long n, const GroupElement& a) const {
  GroupElement c(orders.size());
  for (size_t i = 0; i < orders.size(); ++i) {
    long long r = (n % orders[i]) * (a[i] % orders[i]) % orders[i];
    if (r < 0) r += orders[i];
    c[i] = r;
  }
  return c;
}

long long FinAbGroup::order_of(const GroupElement& a) const {
  long long o = 1;
  for (size_t i = 0; i < orders.size(); ++i) {
    long long g = std::gcd(a[i], orders[i]);
    o = std::lcm(o, orders[i] / (g == 0 ? orders[i] : g));
  }
  return o;
}

bool FinAbGroup::is_zero(const GroupElement& a) const {
  for (long long r : a)
    if (r != 0) return false;
  return true;
}

void FinAbGroup::check_element(const GroupElement& a, const char* what) const {
  if (a.size() != orders.size())
    throw ConsistencyError(std::string(what) + ": element rank mismatch");
  for (size_t i = 0; i < orders.size(); ++i)
    if (a[i] < 0 || a[i] >= orders[i])
      throw ConsistencyError(std::string(what) + ": residue out of range");
}

CircleValue Character::eval(const FinAbGroup& g, const GroupElement& x) const {
  if (coeffs.size() != g.orders.size())
    throw ConsistencyError("character: dimension mismatch with group");
  CircleValue v;
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] < 0 || coeffs[i] >= g.orders[i])
      throw ConsistencyError("character: coefficient out of range");
    v = v + CircleValue(coeffs[i] * x[i], g.orders[i]);
  }
  return v;
}

bool Character::zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](long long c) { return c == 0; });
}

DualGroup dual_group(const FinAbGroup& g) {
  DualGroup d;
  d.group = g;
  long long n = g.size();
  d.characters.reserve(n);
  for (long long i = 0; i < n; ++i) d.characters.push_back(Character{g.element_at(i)});
  return d;
}

GroupElement GroupHom::apply(const GroupElement& x) const {
  source.check_element(x, "hom apply");
  GroupElement y = target.zero();
  for (size_t i = 0; i < images.size(); ++i)
    y = target.add(y, target.scale(x[i], images[i]));
  return y;
}

GroupHom make_hom(const FinAbGroup& source, const FinAbGroup& target,
                  std::vector<GroupElement> images) {
  if (images.size() != source.orders.size())
    throw ConsistencyError("hom: one generator image per source factor required");
  for (size_t i = 0; i < images.size(); ++i) {
    target.check_element(images[i], "hom image");
    if (!target.is_zero(target.scale(source.orders[i], images[i])))
      throw ConsistencyError("hom: generator image not killed by generator order");
  }
  return GroupHom{source, target, std::move(images)};
}

std::vector<GroupHom> hom_enumerate(const FinAbGroup& s, const FinAbGroup& t) {
  // valid images per source generator, in element order
  std::vector<std::vector<GroupElement>> valid(s.orders.size());
  long long tn = t.size();
  for (size_t i = 0; i < s.orders.size(); ++i)
    for (long long j = 0; j < tn; ++j) {
      GroupElement e = t.element_at(j);
      if (t.is_zero(t.scale(s.orders[i], e))) valid[i].push_back(e);
    }
  std::vector<GroupHom> out;
  std::vector<size_t> pick(s.orders.size(), 0);
  while (true) {
    std::vector<GroupElement> images;
    images.reserve(pick.size());
    for (size_t i = 0; i < pick.size(); ++i) images.push_back(valid[i][pick[i]]);
    out.push_back(GroupHom{s, t, std::move(images)});
    size_t i = pick.size();
    while (i-- > 0) {
      if (++pick[i] < valid[i].size()) break;
      pick[i] = 0;
      if (i == 0) return out;
    }
    if (pick.empty()) return out;
  }
}

std::vector<GroupElement> annihilator(const FinAbGroup& k,
                                      const std::vector<Character>& d) {
  std::vector<GroupElement> out;
  long long n = k.size();
  for (long long i = 0; i < n; ++i) {
    GroupElement e = k.element_at(i);
    bool killed = true;
    for (const Character& xi : d)
      if (!xi.eval(k, e).zero()) { killed = false; break; }
    if (killed) out.push_back(e);
  }
  return out;
}

namespace {

// closure of a set of cayley indices under the table
std::vector<int> span_of(int n, const std::function<int(int, int)>& mul, int identity,
                         const std::vector<int>& gens) {
  std::vector<char> in(n, 0);
  std::vector<int> members{identity};
  in[identity] = 1;
  for (size_t head = 0; head < members.size(); ++head)
    for (int g : gens) {
      int y = mul(members[head], g);
      if (!in[y]) { in[y] = 1; members.push_back(y); }
    }
  std::sort(members.begin(), members.end());
  return members;
}

long long cayley_order(int n, const std::function<int(int, int)>& mul, int identity,
                       int g) {
  long long o = 1;
  int x = g;
  while (x != identity) {
    x = mul(x, g);
    ++o;
    if (o > n) throw InternalError("cayley element order exceeds group size");
  }
  return o;
}

} // namespace

AbelianStructure abelian_structure(int n, const std::function<int(int, int)>& mul,
                                   int identity) {
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b)
      if (mul(a, b) != mul(b, a))
        throw PreconditionError("abelian_structure: table is not commutative");

  std::vector<long long> ord(n);
  for (int g = 0; g < n; ++g) ord[g] = cayley_order(n, mul, identity, g);

  // Greedy direct-sum basis with backtracking: candidates in descending
  // element order, ascending index within an order.
  std::vector<int> candidates(n);
  std::iota(candidates.begin(), candidates.end(), 0);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](int a, int b) { return ord[a] > ord[b]; });

  std::vector<int> basis;
  std::vector<int> span{identity};
  std::function<bool(long long)> grow = [&](long long span_size) -> bool {
    if (span_size == n) return true;
    for (int g : candidates) {
      if (g == identity) continue;
      if (span_size * ord[g] > n) continue;
      if (std::binary_search(span.begin(), span.end(), g)) continue;
      std::vector<int> gens = basis;
      gens.push_back(g);
      std::vector<int> new_span = span_of(n, mul, identity, gens);
      if ((long long)new_span.size() != span_size * ord[g]) continue; // not direct
      std::vector<int> saved_span = span;
      basis.push_back(g);
      span = std::move(new_span);
      if (grow(span_size * ord[g])) return true;
      basis.pop_back();
      span = std::move(saved_span);
    }
    return false;
  };
  if (!grow(1) && n > 1)
    throw InternalError("abelian_structure: no cyclic decomposition found");

  AbelianStructure st;
  std::vector<long long> orders;
  for (int b : basis) orders.push_back(ord[b]);
  if (orders.empty()) orders.push_back(1);
  st.group = FinAbGroup(orders);

  long long total = st.group.size();
  if (total != n) throw InternalError("abelian_structure: size mismatch");
  st.cayley_of_index.assign(n, -1);
  st.index_of_cayley.assign(n, -1);
  for (long long idx = 0; idx < total; ++idx) {
    GroupElement e = st.group.element_at(idx);
    int x = identity;
    for (size_t i = 0; i < basis.size(); ++i)
      for (long long rep = 0; rep < e[i]; ++rep) x = mul(x, basis[i]);
    st.cayley_of_index[idx] = x;
    st.index_of_cayley[x] = idx;
  }
  for (int x = 0; x < n; ++x)
    if (st.index_of_cayley[x] < 0)
      throw InternalError("abelian_structure: decomposition map not bijective");
  return st;
}

} // namespace clab
