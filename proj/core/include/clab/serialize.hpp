#ifndef CLAB_SERIALIZE_HPP
#define CLAB_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "clab/cocycle.hpp"
#include "clab/system.hpp"

namespace clab {

using ojson = nlohmann::ordered_json;

ojson group_to_json(const FinAbGroup& g);
FinAbGroup group_from_json(const ojson& j);

ojson system_to_json(const FiniteSystem& x);
FiniteSystem system_from_json(const ojson& j);

ojson fiber_to_json(const Fiber& f);
Fiber fiber_from_json(const ojson& j);

// {"base": system, "fiber": group or {"circle": M}, "tables": [...]};
// circle values serialize as "p/q" strings, finite values as residue arrays
ojson cocycle_to_json(const Cocycle& rho);
Cocycle cocycle_from_json(const ojson& j);

ojson transfer_to_json(const TransferFunction& f);
ojson partition_to_json(const FactorPartition& p);

// parses a file, raising ParseError with the offending path
ojson load_json(const std::string& path);

// writes via a temporary file and an atomic rename
void write_json_atomic(const std::string& path, const ojson& j);

} // namespace clab

#endif
