#pragma once

#include "iwa/diagnostics.hpp"
#include "iwa/error.hpp"
#include "iwa/fdist.hpp"
#include "iwa/ingest.hpp"
#include "iwa/io.hpp"
#include "iwa/linalg.hpp"
#include "iwa/ols.hpp"
#include "iwa/selection.hpp"
#include "iwa/spatiotemporal.hpp"
