//! Projects a DAG with latent common causes onto its observed vertices and
//! checks that d-separation in the DAG agrees with m-separation in the
//! projection for every query over the observed vertices.

use covfit::{Dag, SeparationQuery};

fn main() -> covfit::Result<()> {
    let dag = Dag::parse(include_str!("../data/four_path_latent.dag"))?;
    let g = dag.latent_projection()?;
    print!("{}", g.to_text());

    let observed = dag.observed();
    let p = observed.len();
    let mut checked = 0;
    // Every assignment of the observed vertices to A, B, the conditioning
    // set or neither, with A and B non-empty.
    for code in 0..4usize.pow(p as u32) {
        let (mut a, mut b, mut s) = (vec![], vec![], vec![]);
        let mut c = code;
        for k in 0..p {
            match c % 4 {
                1 => a.push(k),
                2 => b.push(k),
                3 => s.push(k),
                _ => {}
            }
            c /= 4;
        }
        if a.is_empty() || b.is_empty() {
            continue;
        }
        let on_g = SeparationQuery::from_indices(p, a.clone(), b.clone(), s.clone())?;
        let lift = |set: &[usize]| set.iter().map(|&k| observed[k]).collect::<Vec<_>>();
        let on_dag = SeparationQuery::from_indices(dag.len(), lift(&a), lift(&b), lift(&s))?;
        assert_eq!(dag.d_separated(&on_dag)?, g.m_separated(&on_g)?);
        checked += 1;
    }
    println!("\nd-separation and m-separation agree on all {checked} queries");
    Ok(())
}
