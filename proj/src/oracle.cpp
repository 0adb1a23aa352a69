// Reference enumeration for compile(): deliberately naive and self-contained.

#include <map>

#include "psh/error.hpp"
#include "psh/model.hpp"

namespace psh {

std::set<Assignment> oracle_sections(const Model& m, const Subset& u,
                                     std::uint64_t max_product) {
  std::vector<const Fiber*> fibers;
  std::uint64_t product = 1;
  for (const auto& x : u) {
    const Fiber& f = m.fiber(x);
    fibers.push_back(&f);
    product *= f.values.size();
    if (product > max_product)
      throw BoundRefusal("oracle product over " + u.str() + " too large", product, max_product);
  }

  std::vector<const ConstraintTable*> applicable;
  for (const auto& t : m.tables) {
    bool inside = true;
    for (const auto& x : t.scope) inside = inside && u.contains(x);
    if (inside) applicable.push_back(&t);
  }

  std::set<Assignment> out;
  std::vector<std::size_t> odo(fibers.size(), 0);
  for (std::uint64_t n = 0; n < product; ++n) {
    std::map<std::string, std::string> binding;
    std::vector<std::string> values;
    for (std::size_t i = 0; i < fibers.size(); ++i) {
      binding[fibers[i]->feature] = fibers[i]->values[odo[i]];
      values.push_back(fibers[i]->values[odo[i]]);
    }
    bool ok = true;
    for (const auto* t : applicable) {
      std::vector<std::string> tuple;
      for (const auto& x : t->scope) tuple.push_back(binding.at(x));
      const bool listed = t->tuples.find(tuple) != t->tuples.end();
      ok = ok && (t->polarity == Polarity::allow ? listed : !listed);
    }
    if (ok) out.insert(Assignment(u, values));
    for (std::size_t i = 0; i < odo.size(); ++i) {
      if (++odo[i] < fibers[i]->values.size()) break;
      odo[i] = 0;
    }
  }
  return out;
}

}  // namespace psh
