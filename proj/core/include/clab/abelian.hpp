#ifndef CLAB_ABELIAN_HPP
#define CLAB_ABELIAN_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "clab/rational.hpp"

namespace clab {

using GroupElement = std::vector<long long>;

// Finite abelian group presented as a product of cyclic groups Z/N_i.
// Elements are residue tuples, ordered lexicographically; the rank of a
// tuple in that order is its element index.
struct FinAbGroup {
  std::vector<long long> orders;

  FinAbGroup() = default;
  explicit FinAbGroup(std::vector<long long> cyclic_orders);

  int rank() const { return int(orders.size()); }
  long long size() const;
  long long exponent() const; // lcm of the orders; 1 for the trivial group

  long long index_of(const GroupElement& x) const;
  GroupElement element_at(long long index) const;
  GroupElement zero() const { return GroupElement(orders.size(), 0); }
  GroupElement generator(int i) const;

  GroupElement add(const GroupElement& a, const GroupElement& b) const;
  GroupElement neg(const GroupElement& a) const;
  GroupElement sub(const GroupElement& a, const GroupElement& b) const;
  GroupElement scale(long long n, const GroupElement& a) const;
  long long order_of(const GroupElement& a) const;
  bool is_zero(const GroupElement& a) const;
  void check_element(const GroupElement& a, const char* what) const;

  friend bool operator==(const FinAbGroup& a, const FinAbGroup& b) {
    return a.orders == b.orders;
  }
};

// Character of a FinAbGroup: x -> sum_i coeffs[i]*x_i/N_i mod 1.
struct Character {
  std::vector<long long> coeffs;

  CircleValue eval(const FinAbGroup& g, const GroupElement& x) const;
  bool zero() const;
};

struct DualGroup {
  FinAbGroup group;                  // same cyclic orders as the source
  std::vector<Character> characters; // all |G| characters, lexicographic
};

DualGroup dual_group(const FinAbGroup& g);

// Homomorphism between finite abelian groups, stored by generator images.
struct GroupHom {
  FinAbGroup source;
  FinAbGroup target;
  std::vector<GroupElement> images; // image of each source generator

  GroupElement apply(const GroupElement& x) const;
};

GroupHom make_hom(const FinAbGroup& source, const FinAbGroup& target,
                  std::vector<GroupElement> images);

// All homomorphisms S -> T, lexicographic in the tuple of generator images.
std::vector<GroupHom> hom_enumerate(const FinAbGroup& s, const FinAbGroup& t);

// {k in K : xi(k) = 0 for all xi in d}, as a sorted element list.
std::vector<GroupElement> annihilator(const FinAbGroup& k,
                                      const std::vector<Character>& d);

// Recover the cyclic decomposition of an abelian group given by a Cayley
// table, together with explicit index maps in both directions.
struct AbelianStructure {
  FinAbGroup group;
  std::vector<long long> index_of_cayley; // cayley index -> group element index
  std::vector<int> cayley_of_index;       // group element index -> cayley index
};

AbelianStructure abelian_structure(int n, const std::function<int(int, int)>& mul,
                                   int identity);

} // namespace clab

#endif
