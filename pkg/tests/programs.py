"""Hand-written IR programs shared by the tests."""

# alloc 3, split (2,1), CNOT on the pair through a call, concat back, measure all
SPLIT_CALL_MEASURE = """module {
  func @cnot_on_2(%p: qubit<2>) -> (qubit<2>) {
    %a, %b = qssa.split %p : (qubit<2>) -> (qubit<1>, qubit<1>)
    %c, %t = qssa.CNOT %a, %b : (qubit<1>, qubit<1>) -> (qubit<1>, qubit<1>)
    %r = qssa.concat %c, %t : (qubit<1>, qubit<1>) -> (qubit<2>)
    return %r : (qubit<2>) -> ()
  }
  func @main() -> (tensor<3xi1>, qubit<3>) {
    %q0 = qssa.alloc : () -> (qubit<3>)
    %q1, %q2 = qssa.split %q0 : (qubit<3>) -> (qubit<2>, qubit<1>)
    %q3 = call @cnot_on_2(%q1) : (qubit<2>) -> (qubit<2>)
    %q4 = qssa.concat %q3, %q2 : (qubit<2>, qubit<1>) -> (qubit<3>)
    %m, %q5 = qssa.measure %q4 : (qubit<3>) -> (tensor<3xi1>, qubit<3>)
    return %m, %q5 : (tensor<3xi1>, qubit<3>) -> ()
  }
}
"""

# the same H on one qubit in both branches, with an unrelated X interleaved in one branch;
# the branch condition comes from measuring an Ry-rotated qubit
HOIST_BRANCHES = """module {
  func @main() -> (qubit<1>, qubit<1>, qubit<1>) {
    %a0 = qssa.alloc : () -> (qubit<1>)
    %b0 = qssa.alloc : () -> (qubit<1>)
    %c0 = qssa.alloc : () -> (qubit<1>)
    %cell = memref.alloc_bit {index = 0, name = "c", size = 1} : () -> (memref<i1>)
    %out = memref.alloc_bit {index = 0, name = "out", size = 2} : () -> (memref<i1>)
    %out1 = memref.alloc_bit {index = 1, name = "out", size = 2} : () -> (memref<i1>)
    %c1 = qssa.Ry %c0 {angle = 1.2} : (qubit<1>) -> (qubit<1>)
    %m, %c2 = qssa.measure %c1 : (qubit<1>) -> (tensor<1xi1>, qubit<1>)
    memref.store_bit %m, %cell {index = 0} : (tensor<1xi1>, memref<i1>) -> ()
    %bit = memref.load_bit %cell : (memref<i1>) -> (i1)
    %a3, %b3 = scf.if %bit : (i1) -> (qubit<1>, qubit<1>) {
      %b1 = qssa.X %b0 : (qubit<1>) -> (qubit<1>)
      %a1 = qssa.H %a0 : (qubit<1>) -> (qubit<1>)
      scf.yield %a1, %b1 : (qubit<1>, qubit<1>) -> ()
    } {
      %a2 = qssa.H %a0 : (qubit<1>) -> (qubit<1>)
      scf.yield %a2, %b0 : (qubit<1>, qubit<1>) -> ()
    }
    %ma, %a4 = qssa.measure %a3 : (qubit<1>) -> (tensor<1xi1>, qubit<1>)
    memref.store_bit %ma, %out {index = 0} : (tensor<1xi1>, memref<i1>) -> ()
    %mb, %b4 = qssa.measure %b3 : (qubit<1>) -> (tensor<1xi1>, qubit<1>)
    memref.store_bit %mb, %out1 {index = 0} : (tensor<1xi1>, memref<i1>) -> ()
    return %a4, %b4, %c2 : (qubit<1>, qubit<1>, qubit<1>) -> ()
  }
}
"""

# two allocations, H, CNOT, both qubits measured into a two-bit register
ENTANGLE_MEASURE = """module {
  func @main() -> (qubit<1>, qubit<1>) {
    %q0 = qssa.alloc : () -> (qubit<1>)
    %q1 = qssa.alloc : () -> (qubit<1>)
    %c0 = memref.alloc_bit {index = 0, name = "c", size = 2} : () -> (memref<i1>)
    %c1 = memref.alloc_bit {index = 1, name = "c", size = 2} : () -> (memref<i1>)
    %q2 = qssa.H %q0 : (qubit<1>) -> (qubit<1>)
    %q3, %q4 = qssa.CNOT %q2, %q1 : (qubit<1>, qubit<1>) -> (qubit<1>, qubit<1>)
    %m0, %q5 = qssa.measure %q3 : (qubit<1>) -> (tensor<1xi1>, qubit<1>)
    memref.store_bit %m0, %c0 {index = 0} : (tensor<1xi1>, memref<i1>) -> ()
    %m1, %q6 = qssa.measure %q4 : (qubit<1>) -> (tensor<1xi1>, qubit<1>)
    memref.store_bit %m1, %c1 {index = 0} : (tensor<1xi1>, memref<i1>) -> ()
    return %q5, %q6 : (qubit<1>, qubit<1>) -> ()
  }
}
"""


def _func(body: str, results: str = "") -> str:
    return f"module {{\n  func @main() -> ({results}) {{\n{body}\n  }}\n}}\n"


# name -> (program text, hand-labelled verdict: True means a single-use violation)
ADVERSARIAL = {
    "same-region-double-use": (_func("""
    %a = qssa.alloc : qubit<1>
    %b = qssa.H %a : qubit<1>
    %c = qssa.H %a : qubit<1>
    return : () -> ()"""), True),
    "cnot-on-one-value": (_func("""
    %a = qssa.alloc : qubit<1>
    %t = qssa.alloc : qubit<1>
    %b, %c = qssa.CNOT %a, %t : (qubit<1>, qubit<1>) -> (qubit<1>, qubit<1>)
    return : () -> ()"""), True),
    "cross-block-path": (_func("""
    %a = qssa.alloc : qubit<1>
    %b = qssa.H %a : qubit<1>
    br ^bb1 : () -> ()
   ^bb1:
    %c = qssa.X %a : qubit<1>
    return : () -> ()"""), True),
    "diamond-branches": (_func("""
    %a = qssa.alloc : qubit<1>
    %x = std.const_int {value = 1} : i64
    %c = std.cmpi %x, %x {pred = "eq"} : (i64, i64) -> (i1)
    cond_br %c, ^bb1, ^bb2 : (i1) -> ()
   ^bb1:
    %b = qssa.H %a : qubit<1>
    br ^bb3 : () -> ()
   ^bb2:
    %d = qssa.X %a : qubit<1>
    br ^bb3 : () -> ()
   ^bb3:
    return : () -> ()"""), False),
    "loop-escape": (_func("""
    %a = qssa.alloc : qubit<1>
    %q = qssa.alloc : qubit<1>
    %lo = std.const_int {value = 0} : i64
    %hi = std.const_int {value = 4} : i64
    %st = std.const_int {value = 1} : i64
    %r = scf.for %lo, %hi, %st, %a : (i64, i64, i64, qubit<1>) -> (qubit<1>) {
    ^bb0(%i: i64, %x: qubit<1>):
      %y = qssa.H %x : qubit<1>
      %z = qssa.X %q : qubit<1>
      scf.yield %y : (qubit<1>) -> ()
    }
    return %r : (qubit<1>) -> ()""", "qubit<1>"), True),
    "loop-iter-args": (_func("""
    %a = qssa.alloc : qubit<1>
    %q = qssa.alloc : qubit<1>
    %lo = std.const_int {value = 0} : i64
    %hi = std.const_int {value = 4} : i64
    %st = std.const_int {value = 1} : i64
    %r, %s = scf.for %lo, %hi, %st, %a, %q : (i64, i64, i64, qubit<1>, qubit<1>) -> (qubit<1>, qubit<1>) {
    ^bb0(%i: i64, %x: qubit<1>, %w: qubit<1>):
      %y = qssa.H %x : qubit<1>
      %z = qssa.X %w : qubit<1>
      scf.yield %y, %z : (qubit<1>, qubit<1>) -> ()
    }
    return %r, %s : (qubit<1>, qubit<1>) -> ()""", "qubit<1>, qubit<1>"), False),
    "sibling-branches": (_func("""
    %a = qssa.alloc : qubit<1>
    %x = std.const_int {value = 1} : i64
    %c = std.cmpi %x, %x {pred = "eq"} : (i64, i64) -> (i1)
    %r = scf.if %c : (i1) -> (qubit<1>) {
      %b = qssa.H %a : qubit<1>
      scf.yield %b : (qubit<1>) -> ()
    } {
      %d = qssa.X %a : qubit<1>
      scf.yield %d : (qubit<1>) -> ()
    }
    return %r : (qubit<1>) -> ()""", "qubit<1>"), False),
    "captured-value-reused-after-if": (_func("""
    %a = qssa.alloc : qubit<1>
    %x = std.const_int {value = 1} : i64
    %c = std.cmpi %x, %x {pred = "eq"} : (i64, i64) -> (i1)
    %r = scf.if %c : (i1) -> (qubit<1>) {
      %b = qssa.H %a : qubit<1>
      scf.yield %b : (qubit<1>) -> ()
    } {
      scf.yield %a : (qubit<1>) -> ()
    }
    %e = qssa.X %a : qubit<1>
    return %r : (qubit<1>) -> ()""", "qubit<1>"), True),
    "if-result-used-after": (_func("""
    %a = qssa.alloc : qubit<1>
    %x = std.const_int {value = 1} : i64
    %c = std.cmpi %x, %x {pred = "eq"} : (i64, i64) -> (i1)
    %r = scf.if %c : (i1) -> (qubit<1>) {
      %b = qssa.H %a : qubit<1>
      scf.yield %b : (qubit<1>) -> ()
    } {
      scf.yield %a : (qubit<1>) -> ()
    }
    %e = qssa.X %r : qubit<1>
    return %e : (qubit<1>) -> ()""", "qubit<1>"), False),
    "value-yielded-twice": (_func("""
    %a = qssa.alloc : qubit<1>
    %x = std.const_int {value = 1} : i64
    %c = std.cmpi %x, %x {pred = "eq"} : (i64, i64) -> (i1)
    %r, %s = scf.if %c : (i1) -> (qubit<1>, qubit<1>) {
      %b = qssa.H %a : qubit<1>
      scf.yield %b, %b : (qubit<1>, qubit<1>) -> ()
    } {
      %n = qssa.alloc : qubit<1>
      scf.yield %a, %n : (qubit<1>, qubit<1>) -> ()
    }
    return %r, %s : (qubit<1>, qubit<1>) -> ()""", "qubit<1>, qubit<1>"), True),
    "two-ifs-capture-one-qubit": (_func("""
    %a = qssa.alloc : qubit<1>
    %x = std.const_int {value = 1} : i64
    %c = std.cmpi %x, %x {pred = "eq"} : (i64, i64) -> (i1)
    scf.if %c : (i1) -> () {
      %b = qssa.H %a : qubit<1>
      scf.yield : () -> ()
    } {
      scf.yield : () -> ()
    }
    scf.if %c : (i1) -> () {
      scf.yield : () -> ()
    } {
      %d = qssa.X %a : qubit<1>
      scf.yield : () -> ()
    }
    return : () -> ()"""), True),
    "reuse-of-measured-qubit": (_func("""
    %a = qssa.alloc : qubit<1>
    %m, %a1 = qssa.measure %a : (qubit<1>) -> (tensor<1xi1>, qubit<1>)
    %b = qssa.H %a : qubit<1>
    return %m, %a1 : (tensor<1xi1>, qubit<1>) -> ()""", "tensor<1xi1>, qubit<1>"), True),
}


def load_adversarial(name: str):
    """Parse one adversarial case.

    The text parser rejects `CNOT %a, %a` as a type error, so that case is
    written with a second operand and rewired onto the first after parsing.
    """
    from qssa.ir import parse_ir

    text, violates = ADVERSARIAL[name]
    module = parse_ir(text)
    if name == "cnot-on-one-value":
        block = module.main.entry
        spare, cnot = block.ops[1], block.ops[2]
        cnot.set_operand(1, cnot.operands[0])
        block.ops.remove(spare)
    return module, violates
