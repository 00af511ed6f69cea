#pragma once

#include "hbcm/analysis.hpp"
#include "hbcm/clusters.hpp"
#include "hbcm/combinatorics.hpp"
#include "hbcm/dynamics.hpp"
#include "hbcm/experiment_config.hpp"
#include "hbcm/experiments.hpp"
#include "hbcm/generators.hpp"
#include "hbcm/hyperedge.hpp"
#include "hbcm/hypergraph.hpp"
#include "hbcm/hypergraph_io.hpp"
#include "hbcm/parallel.hpp"
#include "hbcm/random.hpp"
#include "hbcm/stats.hpp"
