//! The refactoring catalog: engine entries annotated with the catalog
//! rows they implement.

use serde::Serialize;

use super::Refactoring;

/// The 25 catalog rows, by name.
pub const TABLE_ROWS: [&str; 25] = [
    "Add Parameter",
    "Consolidate Measurement",
    "Extract Function from Operation",
    "Extract Namespace",
    "Extract Operation",
    "Inline Function into Operation",
    "Inline Operation",
    "Introduce Classical Control",
    "Merge Gate",
    "Merge Operations",
    "Order Qubit",
    "Parameterize Operation",
    "Remove Code Duplication",
    "Remove Operation",
    "Remove Parameter",
    "Remove Variable",
    "Rename Variable",
    "Rename Parameter",
    "Rename Operation",
    "Reorder Instructions",
    "Reorder Parameters",
    "Replace Gate",
    "Specialize Operation",
    "Split Operation",
    "Unroll Loop",
];

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    #[serde(skip)]
    pub refactoring: Refactoring,
    pub description: &'static str,
    pub rows: Vec<&'static str>,
    pub target: &'static str,
    pub args: Vec<&'static str>,
}

fn entry(
    refactoring: Refactoring,
    description: &'static str,
    rows: &[&'static str],
    target: &'static str,
    args: &[&'static str],
) -> CatalogEntry {
    CatalogEntry {
        name: refactoring.name(),
        refactoring,
        description,
        rows: rows.to_vec(),
        target,
        args: args.to_vec(),
    }
}

/// Every engine entry, sorted by name.
pub fn catalog() -> Vec<CatalogEntry> {
    use Refactoring::*;
    let mut v = vec![
        entry(
            ChangeSignature,
            "Add new parameters to the definition of an operation; remove unused parameters; reorder the parameters in an operation definition and in all calls to that operation.",
            &["Add Parameter", "Remove Parameter", "Reorder Parameters"],
            "Ns.Callable",
            &["add=name:Type=default | remove=name | reorder=i,j,..."],
        ),
        entry(
            ConsolidateMeasurements,
            "Consolidate multiple measurements in an operation into a single measurement.",
            &["Consolidate Measurement"],
            "Ns.Callable:path..path",
            &["name (optional, default rs)"],
        ),
        entry(
            ExtractFunction,
            "Extract a portion of code within an operation into a separate function to promote code reuse and modularity.",
            &["Extract Function from Operation"],
            "Ns.Callable:path..path",
            &["name"],
        ),
        entry(
            ExtractNamespace,
            "Move operations (functions) into a new namespace for better organization.",
            &["Extract Namespace"],
            "Ns.A,Ns.B,...",
            &["namespace"],
        ),
        entry(
            ExtractOperation,
            "Extract a portion of code into a new operation to promote code reuse and modularity.",
            &["Extract Operation"],
            "Ns.Callable:path..path",
            &["name", "params (optional, old=new,...)"],
        ),
        entry(
            InlineCallable,
            "Replace the invocation of an operation or function with its original code.",
            &["Inline Function into Operation", "Inline Operation"],
            "Ns.Callee (all sites) | Ns.Caller:path (one site)",
            &["callee (optional)"],
        ),
        entry(
            MergeGates,
            "Combine adjacent gates into a single gate to optimize circuit execution.",
            &["Merge Gate"],
            "Ns.Callable | Ns.Callable:path..path",
            &[],
        ),
        entry(
            MergeOperations,
            "Combine multiple operations with similar functionality into a single operation to eliminate redundancy.",
            &["Merge Operations"],
            "Ns.A,Ns.B",
            &["name (optional)", "param (optional)"],
        ),
        entry(
            OrderQubits,
            "Rearrange the qubit order of an allocated register.",
            &["Order Qubit"],
            "Ns.Callable:path (a using statement)",
            &["permutation=i,j,..."],
        ),
        entry(
            ParameterizeOperation,
            "Create one operation that takes a parameter for the values in which several similar operations differ.",
            &["Parameterize Operation"],
            "Ns.A[,Ns.B,...]",
            &["param (optional, default value)", "name (optional)", "literal (optional, single target)"],
        ),
        entry(
            RemoveCodeDuplication,
            "Identify and eliminate duplicated code within an operation.",
            &["Remove Code Duplication"],
            "Ns.Callable:path..path (first occurrence)",
            &["other=path (start of the second occurrence)", "name (optional)"],
        ),
        entry(
            RemoveUnused,
            "Remove an unused variable, parameter or operation that is no longer necessary.",
            &["Remove Operation", "Remove Variable"],
            "Ns.Callable | Ns.Callable::name[@path]",
            &[],
        ),
        entry(
            Rename,
            "Change the name of a variable, parameter or operation throughout and only in its scope.",
            &["Rename Variable", "Rename Parameter", "Rename Operation"],
            "Ns.Callable | Ns.Callable::name[@path]",
            &["name"],
        ),
        entry(
            ReorderInstructions,
            "Swap two independent statements of a block.",
            &["Reorder Instructions"],
            "Ns.Callable:path..path (the two statements)",
            &[],
        ),
        entry(
            ReplaceGate,
            "Replace specific gates with alternative gate sequences or equivalent gates.",
            &["Replace Gate"],
            "Ns.Callable:path[..path]",
            &["rule"],
        ),
        entry(
            RollLoop,
            "Introduce a loop over a run of uniform statements.",
            &["Introduce Classical Control"],
            "Ns.Callable:path..path",
            &["var (optional, default i)"],
        ),
        entry(
            SpecializeOperation,
            "Create a specialized version of an operation for literal arguments at one call site.",
            &["Specialize Operation"],
            "Ns.Caller:path (the call site)",
            &["name (optional)", "callee (optional)"],
        ),
        entry(
            SplitOperation,
            "Divide a large operation into smaller, more focused operations.",
            &["Split Operation"],
            "Ns.Callable",
            &["split=a..b:Name[old=new],..."],
        ),
        entry(
            UnrollLoop,
            "Replace a loop with its unrolled equivalent code.",
            &["Unroll Loop"],
            "Ns.Callable:path (a for statement)",
            &["limit (optional, default 64)"],
        ),
    ];
    v.sort_by_key(|e| e.name);
    v
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    #[test]
    fn rows_are_covered_exactly() {
        let cat = catalog();
        let covered: BTreeSet<&str> = cat.iter().flat_map(|e| e.rows.iter().copied()).collect();
        let table: BTreeSet<&str> = TABLE_ROWS.into_iter().collect();
        assert_eq!(covered, table);
        assert_eq!(covered.len(), 25);
        let engines: BTreeSet<Refactoring> = cat.iter().map(|e| e.refactoring).collect();
        assert_eq!(engines.len(), Refactoring::ALL.len());
    }

    #[test]
    fn sorted_by_name() {
        let names: Vec<&str> = catalog().iter().map(|e| e.name).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }
}
