//! Build the weighted directed retweet graph and query it.
//!
//! ```bash
//! cargo run --example build_graph
//! ```

use retweet_polarity::corpus::RawEdge;
use retweet_polarity::graph::RetweetGraph;

fn edge(src: &str, dst: &str, count: u64) -> RawEdge {
    RawEdge {
        src: src.into(),
        dst: dst.into(),
        count,
    }
}

fn main() -> retweet_polarity::Result<()> {
    env_logger::init();

    // Retweet counts, possibly split across rows; (dana -> alice) stays
    // below the weight threshold and is dropped, but dana remains a node.
    let edges = vec![
        edge("alice", "bob", 3),
        edge("bob", "alice", 1),
        edge("bob", "alice", 1),
        edge("carol", "alice", 5),
        edge("dana", "alice", 1),
        edge("carol", "bob", 2),
    ];
    let graph = RetweetGraph::build(&edges, 2);

    let stats = graph.degree_stats();
    println!(
        "{} nodes, {} edges, mean total degree {:.2}",
        stats.node_count, stats.edge_count, stats.mean_total_degree
    );

    println!(
        "weight alice->bob: {:?} (dana->alice dropped: {:?})",
        graph.weight(&"alice".into(), &"bob".into()),
        graph.weight(&"dana".into(), &"alice".into()),
    );

    // Neighbor queries ignore direction; training positives come from here.
    for user in ["alice", "dana"] {
        let neighbors = graph.undirected_neighbors(&user.into())?;
        println!("undirected neighbors of {user}: {neighbors:?}");
    }
    println!("positive pairs: {:?}", graph.undirected_edges());
    Ok(())
}
