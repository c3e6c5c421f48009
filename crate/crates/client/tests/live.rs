use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use moviesim_client::{Client, ClientError};
use moviesim_core::corpus::ArtifactStore;
use moviesim_core::pipeline::{load_config, Pipeline};
use moviesim_core::similarity::{FusionWeights, Modality};
use moviesim_server::Catalog;

struct Live {
    _dir: tempfile::TempDir,
    pipeline: Pipeline,
    client: Client,
    stop: tokio::sync::oneshot::Sender<()>,
    server: tokio::task::JoinHandle<Result<(), moviesim_server::ServerError>>,
}

async fn start() -> Live {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/minicorpus");
    let mut cfg = load_config(&corpus.join("pipeline.json")).unwrap();
    cfg.artifacts = dir.path().to_path_buf();
    let pipeline = Pipeline::new(cfg, false).unwrap();
    pipeline.run_all().unwrap();
    let catalog = Arc::new(Catalog::load(&ArtifactStore::open(dir.path()).unwrap()).unwrap());

    let listener = moviesim_server::bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (stop, stopped) = tokio::sync::oneshot::channel::<()>();
    let server = tokio::spawn(moviesim_server::serve(listener, catalog, async move {
        let _ = stopped.await;
    }));
    Live {
        _dir: dir,
        pipeline,
        client: Client::new(&format!("http://{addr}/")).unwrap(),
        stop,
        server,
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn client_against_running_service() {
    let live = start().await;
    let c = &live.client;

    assert_eq!(c.movies().await.unwrap().len(), 12);
    assert_eq!(c.movie("m04").await.unwrap().title, "Letters in June");
    assert_eq!(c.topics(Some(5)).await.unwrap().len(), 8);
    assert_eq!(c.topic_words(2, Some(7)).await.unwrap().top_words.len(), 7);
    assert_eq!(c.topic_movies(2).await.unwrap().movies.len(), 12);
    assert_eq!(c.movie_topics("m04").await.unwrap().topics.len(), 8);
    assert_eq!(c.modalities().await.unwrap().len(), 6);
    assert_eq!(c.report().await.unwrap().table.singular.len(), 6);

    match c.movie("nope").await {
        Err(ClientError::Api { status, code, .. }) => assert_eq!((status, code.as_str()), (404, "not_found")),
        other => panic!("{other:?}"),
    }
    let zero = BTreeMap::from([(Modality::Lda, 0.0)]);
    match c.similar("m01", Some(&zero), None).await {
        Err(ClientError::Api { status, code, .. }) => assert_eq!((status, code.as_str()), (400, "bad_request")),
        other => panic!("{other:?}"),
    }

    // what-if fusion over the wire equals offline fusion
    for raw in [
        BTreeMap::from([(Modality::Lda, 0.5), (Modality::Metadata, 0.5)]),
        BTreeMap::from([
            (Modality::Lda, 3.0),
            (Modality::AudioEvent, 1.0),
            (Modality::Tfidf, 0.25),
        ]),
        BTreeMap::from([(Modality::AudioGenre, 1.0)]),
    ] {
        let weights = FusionWeights::normalized(raw.clone()).unwrap();
        let offline = live.pipeline.fuse(&weights).unwrap();
        for (i, id) in offline.movie_order().iter().enumerate() {
            let online = c.similar(id, Some(&raw), Some(100)).await.unwrap();
            assert_eq!(online.weights, weights);
            assert_eq!(online.flagged, offline.is_flagged(i));
            let expected: Vec<(String, f64)> = if offline.is_flagged(i) {
                vec![]
            } else {
                offline
                    .ranking(i)
                    .into_iter()
                    .filter(|&j| !offline.is_flagged(j))
                    .map(|j| (offline.movie_order()[j].clone(), offline.get(i, j)))
                    .collect()
            };
            let got: Vec<(String, f64)> = online.results.into_iter().map(|r| (r.movie_id, r.score)).collect();
            assert_eq!(got, expected, "{id} under {weights}");
        }
    }

    live.stop.send(()).unwrap();
    live.server.await.unwrap().unwrap();
}

#[tokio::test]
async fn unreachable_service_is_an_http_error() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let c = Client::new(&format!("http://{addr}")).unwrap();
    assert!(matches!(c.movies().await, Err(ClientError::Http(_))));
}
