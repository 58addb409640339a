#pragma once

#include "mpiwrapgen/diagnostics.hpp"
#include "mpiwrapgen/spec_model.hpp"

namespace mpiwrapgen {

/// True if `document` has the shape of the MPI Forum's apis.json (an object
/// keyed by lowercase procedure name, each entry with "attributes" and
/// "parameters") rather than the generator's own schema.
bool is_upstream_document(const Json& document);

/// Maps an upstream apis.json document onto the generator's input schema.
/// Callback prototypes and predefined callback functions are dropped; upstream
/// kinds without a mapping are passed through verbatim so that the parser
/// degrades them with a warning.
Json adapt_upstream_document(const Json& document, Diagnostics& diagnostics);

/// Chapter group inferred from a canonical procedure name (p2p, coll, comm,
/// rma, io, misc).
std::string infer_chapter(std::string_view name);

}  // namespace mpiwrapgen
