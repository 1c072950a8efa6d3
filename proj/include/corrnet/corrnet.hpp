#pragma once

#include "corrnet/correlation.hpp"
#include "corrnet/date.hpp"
#include "corrnet/error.hpp"
#include "corrnet/ingest.hpp"
#include "corrnet/io.hpp"
#include "corrnet/netgraph.hpp"
#include "corrnet/pipeline.hpp"
#include "corrnet/returns.hpp"
#include "corrnet/similarity.hpp"
#include "corrnet/synth.hpp"
