#pragma once

// Everything except the HTTP binding (delphi/http_api.hpp).
#include "delphi/adapter.hpp"
#include "delphi/alignment.hpp"
#include "delphi/coding.hpp"
#include "delphi/consensus.hpp"
#include "delphi/corpus.hpp"
#include "delphi/lexicon.hpp"
#include "delphi/report.hpp"
#include "delphi/saturation.hpp"
#include "delphi/serialize.hpp"
#include "delphi/session.hpp"
#include "delphi/validate.hpp"
#include "delphi/workflow.hpp"
