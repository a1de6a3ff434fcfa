#pragma once

#include "manet/batch.hpp"
#include "manet/engine.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/netmodel.hpp"
#include "manet/packets.hpp"
#include "manet/qos.hpp"
#include "manet/routing.hpp"
#include "manet/scenario.hpp"
#include "manet/simulation.hpp"
#include "manet/trace.hpp"
#include "manet/traffic.hpp"
