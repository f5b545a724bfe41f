#pragma once

#include "netident/dot.hpp"
#include "netident/error.hpp"
#include "netident/graph.hpp"
#include "netident/ident.hpp"
#include "netident/indirect.hpp"
#include "netident/io.hpp"
#include "netident/model.hpp"
#include "netident/oracle.hpp"
#include "netident/synth.hpp"
#include "netident/transfer_function.hpp"
