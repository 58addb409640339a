#include "mpiwrapgen/upstream.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <utility>

namespace mpiwrapgen {

namespace {

struct KindMapping {
  std::string_view upstream;
  std::string_view kind;
  std::string_view c_type;
  std::string_view c_type_large;
  std::string_view f08_type;
  std::string_view f08_type_large;
};

// Upstream kind -> closed kind plus C / f08 base types of both variants.
constexpr auto kKindMappings = std::to_array<KindMapping>({
#include "upstream_kinds.inc"
});

const KindMapping* find_mapping(std::string_view upstream) {
  for (const auto& m : kKindMappings) {
    if (m.upstream == upstream) return &m;
  }
  return nullptr;
}

bool is_callback_kind(std::string_view kind) {
  return kind == "FUNCTION" || kind == "POLYFUNCTION" ||
         (kind.starts_with("EVENT_") && kind.ends_with("_FUNCTION"));
}

// Fortran result type of procedures that are functions in Fortran.
constexpr auto kFortranResults = std::to_array<std::pair<std::string_view, std::string_view>>({
    {"WALL_TIME", "double precision"},
    {"TICK_RESOLUTION", "double precision"},
    {"DISPLACEMENT", "integer(kind=MPI_ADDRESS_KIND)"},
    {"LOCATION_SMALL", "integer(kind=MPI_ADDRESS_KIND)"},
});

// Pointer level of the C declarator, following the upstream rules.
int c_pointer_level(const Json& p, std::string_view kind) {
  const auto pointer = p.find("pointer");
  const bool has_pointer = pointer != p.end() && pointer->is_boolean();
  if (has_pointer && !pointer->get<bool>()) return 0;
  const auto length = p.find("length");
  const bool has_length = length != p.end() && !length->is_null();
  if (kind == "STRING_2DARRAY") return 2;
  if (kind == "ARGUMENT_LIST") return 3;
  if (kind == "STRING" && has_length && *length == "*" && !(has_pointer && pointer->get<bool>())) {
    return 0;
  }
  static constexpr auto kPointerKinds = std::to_array<std::string_view>({
      "BUFFER", "C_BUFFER", "C_BUFFER2", "C_BUFFER3", "C_BUFFER4", "STRING", "EXTRA_STATE",
      "EXTRA_STATE2", "ATTRIBUTE_VAL", "STATUS", "ATTRIBUTE_VAL_10", "STRING_ARRAY", "FUNCTION",
      "FUNCTION_SMALL", "POLYFUNCTION", "TOOL_MPI_OBJ", "F08_STATUS", "F90_STATUS",
  });
  if (std::find(kPointerKinds.begin(), kPointerKinds.end(), kind) != kPointerKinds.end()) return 1;
  const std::string direction = p.value("param_direction", "in");
  if ((direction != "in" || (has_pointer && pointer->get<bool>())) && !has_length) return 1;
  return 0;
}

// Array suffix of the C declarator, following the upstream rules.
std::string c_array_suffix(const Json& p, std::string_view kind) {
  if (kind == "C_BUFFER4") return "";
  const auto length = p.find("length");
  const bool has_length = length != p.end() && !length->is_null();
  const auto pointer_it = p.find("pointer");
  const bool pointer = pointer_it != p.end() && pointer_it->is_boolean() && pointer_it->get<bool>();
  if (kind != "STRING" && has_length && !length->is_array() && !pointer) return "[]";
  if (kind == "STRING" && has_length && *length == "*" && !pointer) return "[]";
  if (kind == "STRING_ARRAY" || kind == "STRING_2DARRAY") return "[]";
  if (has_length && length->is_array() && length->size() > 1) {
    const Json& second = (*length)[1];
    return "[][" + (second.is_string() ? second.get<std::string>() : second.dump()) + "]";
  }
  return "";
}

std::string request_array_length(const Json& entry) {
  for (const auto& q : entry.value("parameters", Json::array())) {
    if (q.value("name", "") != "array_of_requests") continue;
    const auto len = q.find("length");
    if (len != q.end() && len->is_string()) return len->get<std::string>();
  }
  return "";
}

bool attribute(const Json& attrs, const char* key) {
  auto it = attrs.find(key);
  return it != attrs.end() && it->is_boolean() && it->get<bool>();
}

bool contains_word(std::string_view haystack, std::string_view word) {
  std::size_t pos = 0;
  while ((pos = haystack.find(word, pos)) != std::string_view::npos) {
    const bool left = pos == 0 || haystack[pos - 1] == ' ';
    const std::size_t end = pos + word.size();
    const bool right = end == haystack.size() || haystack[end] == ' ';
    if (left && right) return true;
    pos = end;
  }
  return false;
}

constexpr auto kCollectiveStems = std::to_array<std::string_view>({
    "Allgather",      "Allgatherv",           "Allreduce", "Alltoall",
    "Alltoallv",      "Alltoallw",            "Barrier",   "Bcast",
    "Exscan",         "Gather",               "Gatherv",   "Reduce",
    "Reduce_scatter", "Reduce_scatter_block", "Scan",      "Scatter",
    "Scatterv",       "Reduce_local",
});

constexpr auto kRmaExact = std::to_array<std::string_view>({
    "Put",          "Get",            "Rput",          "Rget",
    "Accumulate",   "Raccumulate",    "Get_accumulate", "Rget_accumulate",
    "Fetch_and_op", "Compare_and_swap", "Alloc_mem",   "Free_mem",
});

constexpr auto kP2pPrefixes = std::to_array<std::string_view>({
    "Send",     "Bsend",    "Ssend",    "Rsend",    "Recv",     "Isend",
    "Ibsend",   "Issend",   "Irsend",   "Irecv",    "Sendrecv", "Isendrecv",
    "Probe",    "Iprobe",   "Mprobe",   "Improbe",  "Mrecv",    "Imrecv",
    "Wait",     "Test",     "Request_", "Start",    "Cancel",   "Buffer_",
    "Psend",    "Precv",    "Pready",   "Parrived", "Get_count", "Comm_attach_buffer",
});

constexpr auto kCommPrefixes = std::to_array<std::string_view>({
    "Comm_",  "Group_",      "Intercomm_", "Keyval_",    "Attr_",
    "Cart",   "Graph",       "Dist_graph", "Topo_test",  "Intercomm",
});

}  // namespace

std::string infer_chapter(std::string_view name) {
  std::string_view rest = name;
  if (rest.starts_with("MPI_")) rest.remove_prefix(4);

  if (rest.starts_with("File_") || rest == "Register_datarep") return "io";
  if (rest.starts_with("Win_") ||
      std::find(kRmaExact.begin(), kRmaExact.end(), rest) != kRmaExact.end()) {
    return "rma";
  }

  std::string_view stem = rest;
  if (stem.starts_with("Neighbor_") || stem.starts_with("Ineighbor_")) return "coll";
  if (stem.ends_with("_init")) stem.remove_suffix(5);
  if (!stem.empty() && stem.front() == 'I') {
    std::string_view unprefixed = stem.substr(1);
    if (std::find(kCollectiveStems.begin(), kCollectiveStems.end(), unprefixed) !=
        kCollectiveStems.end()) {
      return "coll";
    }
  }
  if (std::find(kCollectiveStems.begin(), kCollectiveStems.end(), stem) !=
      kCollectiveStems.end()) {
    return "coll";
  }

  for (auto prefix : kP2pPrefixes) {
    if (rest.starts_with(prefix)) return "p2p";
  }
  for (auto prefix : kCommPrefixes) {
    if (rest.starts_with(prefix)) return "comm";
  }
  return "misc";
}

bool is_upstream_document(const Json& document) {
  if (!document.is_object() || document.contains("procedures")) return false;
  if (document.empty()) return false;
  const Json& first = document.begin().value();
  return first.is_object() && first.contains("attributes") &&
         first.contains("parameters");
}

Json adapt_upstream_document(const Json& document, Diagnostics& diagnostics) {
  Json out;
  out["format_version"] = 1;
  Json procedures = Json::array();

  for (const auto& [key, entry] : document.items()) {
    const std::string where = "apis.json[" + key + "]";
    if (!entry.is_object() || !entry.contains("name")) {
      throw ParseError(where, "upstream entry lacks a name");
    }
    const Json& attrs = entry.contains("attributes") ? entry["attributes"] : Json::object();
    // Callback prototypes and predefined callbacks are not wrappable procedures.
    if (attribute(attrs, "callback")) continue;
    if (auto it = attrs.find("predefined_function"); it != attrs.end() && !it->is_null()) {
      continue;
    }

    const std::string name = entry["name"].get<std::string>();
    Json proc;
    proc["name"] = name;
    proc["chapter"] = infer_chapter(name);

    const bool c = attribute(attrs, "c_expressible");
    const bool fortran = attribute(attrs, "f90_expressible");
    const bool f08 = attribute(attrs, "f08_expressible");

    bool callback = false;
    bool attribute_caching = false;
    bool large_count = false;
    Json params = Json::array();
    for (const auto& p : entry.value("parameters", Json::array())) {
      if (p.value("large_only", false)) {
        large_count = true;
        continue;
      }
      const std::string kind = p.value("kind", "");
      const std::string suppress = p.value("suppress", "");
      if (kind.starts_with("POLY")) large_count = true;
      if (is_callback_kind(kind)) callback = true;
      if (kind == "KEYVAL" || kind.starts_with("ATTRIBUTE_VAL")) attribute_caching = true;

      Json param;
      param["name"] = p.value("name", "");
      const KindMapping* m = find_mapping(kind);
      std::string closed = m ? std::string(m->kind) : kind;
      std::string c_type = m ? std::string(m->c_type) : "";
      std::string c_type_large = m ? std::string(m->c_type_large) : "";
      std::string f08_type = m ? std::string(m->f08_type) : "";
      std::string f08_type_large = m ? std::string(m->f08_type_large) : "";
      if (closed == "ERROR_CODE" && p.value("name", "") != "ierror") {
        // Error codes passed as data (MPI_Abort, MPI_Add_error_code).
        closed = "OTHER_INT";
      }
      param["kind"] = closed;
      param["direction"] = p.value("param_direction", "in");
      const auto len = p.find("length");
      const bool has_length = len != p.end() && !len->is_null();
      // The length of a single string is its character length, not a count.
      if ((has_length && kind != "STRING") || kind == "STRING_ARRAY" || kind == "STRING_2DARRAY") {
        param["array"] = true;
      }
      if (has_length && kind != "STRING") {
        const Json& first = len->is_array() ? (*len)[0] : *len;
        std::string dep = first.is_string() ? first.get<std::string>() : "";
        // Unsized status and index arrays of completion routines have the
        // capacity of the request array.
        if (dep == "*") dep = request_array_length(entry);
        const auto& all = entry["parameters"];
        const bool names_param = std::any_of(all.begin(), all.end(), [&](const Json& q) {
          return q.value("name", "") == dep && !q.value("large_only", false);
        });
        if (names_param) param["count"] = dep;
      }
      if (contains_word(suppress, "f08_parameter") &&
          contains_word(suppress, "f90_parameter")) {
        param["c_only"] = true;
      }
      if (is_callback_kind(kind)) {
        const std::string func_type = p.value("func_type", "");
        c_type = func_type;
        c_type_large = kind == "POLYFUNCTION" && !func_type.empty() ? func_type + "_c" : "";
        f08_type = func_type.empty() ? "" : "procedure(" + func_type + ")";
        f08_type_large = "";
      }
      static constexpr auto kTypedF08 = std::to_array<std::string_view>({
          "COUNT", "RANK", "TAG", "INDEX", "OTHER_INT", "OTHER_OPAQUE", "CALLBACK"});
      const bool typed_f08 = std::find(kTypedF08.begin(), kTypedF08.end(), closed) != kTypedF08.end();
      if (!c_type.empty()) {
        param["c_type"] = c_type;
        param["c_pointers"] = c_pointer_level(p, kind);
        if (attribute(p, "constant")) param["c_const"] = true;
        if (auto suffix = c_array_suffix(p, kind); !suffix.empty()) param["c_array"] = suffix;
      }
      if (!c_type_large.empty() && c_type_large != c_type) param["c_type_large"] = c_type_large;
      if (typed_f08 && !f08_type.empty()) param["f08_type"] = f08_type;
      if (typed_f08 && !f08_type_large.empty() && f08_type_large != f08_type) {
        param["f08_type_large"] = f08_type_large;
      }
      params.push_back(std::move(param));
    }

    proc["bindings"] = {{"c", c}, {"fortran", fortran}, {"f08", f08}};
    proc["attributes"] = {{"callback", callback},
                          {"attribute_caching", attribute_caching},
                          {"fortran_only", !c && (fortran || f08)},
                          {"large_count", large_count}};

    const std::string ret = entry.value("return_kind", "ERROR_CODE");
    if (const auto* rm = find_mapping(ret)) {
      proc["c_return"] = std::string(rm->c_type);
    } else if (ret == "NOTHING") {
      proc["c_return"] = "void";
    } else {
      diagnostics.warn(where, "unmapped return kind '" + ret + "'; using int");
      proc["c_return"] = "int";
    }
    auto fr = std::find_if(kFortranResults.begin(), kFortranResults.end(),
                           [&](const auto& r) { return r.first == ret; });
    if (fr != kFortranResults.end() && (fortran || f08)) proc["fortran_result"] = std::string(fr->second);
    proc["parameters"] = std::move(params);
    procedures.push_back(std::move(proc));
  }
  out["procedures"] = std::move(procedures);
  return out;
}

}  // namespace mpiwrapgen
