#pragma once

#include "classify.hpp"
#include "commands.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "expr_parser.hpp"
#include "geodesic.hpp"
#include "metric_eval.hpp"
#include "metric_file.hpp"
#include "poly.hpp"
#include "probes.hpp"
#include "report.hpp"
#include "spray.hpp"
#include "sym_field.hpp"
#include "tensor.hpp"
