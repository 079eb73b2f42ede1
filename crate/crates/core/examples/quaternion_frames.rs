//! Quaternion algebra, the adjoint rotation and the invariant frames.

use knotlight::frames::{adjoint_rotation, bracket, invariant_field, maurer_cartan, sphere_map, FrameSide};
use knotlight::quaternion::Quaternion;

fn main() -> knotlight::Result<()> {
    let q = Quaternion::new(1.0, 2.0, -1.0, 0.5);
    let (r, u) = q.normalize()?;
    println!("q = {q}, |q| = {r:.6}");
    println!("q * q^-1 = {}", q * q.inverse()?);

    let rot = adjoint_rotation(u);
    println!(
        "det Q = {:.15}, |Q^T Q - I| = {:.1e}",
        rot.determinant(),
        rot.orthogonality_defect()
    );
    for i in 1..=3 {
        println!("l_{i}(u) = {:?}", sphere_map(i, u));
    }

    for a in 1..=3 {
        let l = invariant_field(FrameSide::Left, a, q);
        println!("L_{a}(q) = {:?}, L_{a}.L_{a} = {:.6}", l.0, l.dot(&l));
    }
    println!("[L_1, L_2] = {:?}", bracket(FrameSide::Left, 1, 2));
    println!("[R_1, R_2] = {:?}", bracket(FrameSide::Right, 1, 2));

    let mc = maurer_cartan(q)?;
    let v = invariant_field(FrameSide::Left, 2, q).0;
    println!("lambda(L_2) = {}", mc.apply(&v));
    Ok(())
}
