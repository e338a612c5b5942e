#ifndef SIMDIALOG_SIMDIALOG_HPP
#define SIMDIALOG_SIMDIALOG_HPP

// Everything except the HTTP server (simdialog/server.hpp), which pulls in
// cpp-httplib and is included separately.

#include "simdialog/builder.hpp"
#include "simdialog/error.hpp"
#include "simdialog/graph.hpp"
#include "simdialog/model.hpp"
#include "simdialog/number.hpp"
#include "simdialog/persistence.hpp"
#include "simdialog/report.hpp"
#include "simdialog/runtime.hpp"
#include "simdialog/scoring.hpp"
#include "simdialog/script_import.hpp"
#include "simdialog/validate.hpp"

#endif  // SIMDIALOG_SIMDIALOG_HPP
