#pragma once

#include "flipbench/error.hpp"
#include "flipbench/rational.hpp"
#include "flipbench/core.hpp"
#include "flipbench/instance_io.hpp"
#include "flipbench/generator.hpp"
#include "flipbench/engine.hpp"
#include "flipbench/trace_io.hpp"
#include "flipbench/analysis.hpp"
#include "flipbench/matrices.hpp"
#include "flipbench/certificates.hpp"
#include "flipbench/harness.hpp"
